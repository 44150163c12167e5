//! Device parameters, pump configurations, bath occupations and the scalar
//! rates derived from them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::constants::{hz_to_rad, rad_to_hz, HBAR, K_B};
use crate::error::{Error, Result};

/// Sideband-resolution ratio `ω_m/κ` below which a good-cavity regime is flagged.
pub const GOOD_CAVITY_MIN_RATIO: f64 = 2.0;

/// Static rates and frequencies of the device, all in rad/s.
///
/// `g0` is the single-photon coupling in the dimensionless-position
/// convention `x = (b† + b)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemParams {
    pub omega_c: f64,
    pub omega_m: f64,
    pub kappa_e: f64,
    pub kappa_i: f64,
    pub gamma: f64,
    pub g0: f64,
}

impl SystemParams {
    /// Builds a parameter set, rejecting non-finite or non-positive entries.
    pub fn new(omega_c: f64, omega_m: f64, kappa_e: f64, kappa_i: f64, gamma: f64, g0: f64) -> Result<Self> {
        let p = Self { omega_c, omega_m, kappa_e, kappa_i, gamma, g0 };
        let issues = p.issues();
        if issues.is_empty() {
            Ok(p)
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Same as [`SystemParams::new`] with every argument in Hz.
    pub fn from_hz(f_c: f64, f_m: f64, kappa_e_hz: f64, kappa_i_hz: f64, gamma_hz: f64, g0_hz: f64) -> Result<Self> {
        Self::new(
            hz_to_rad(f_c),
            hz_to_rad(f_m),
            hz_to_rad(kappa_e_hz),
            hz_to_rad(kappa_i_hz),
            hz_to_rad(gamma_hz),
            hz_to_rad(g0_hz),
        )
    }

    /// The measured membrane device: 4.517 GHz cavity, 707.4 kHz membrane mode,
    /// κ_i/2π = 156 kHz, κ_e/2π = 145 kHz, γ/2π = 8.8 mHz, g0/2π ≈ 10 Hz (estimate).
    pub fn membrane_device() -> Self {
        Self {
            omega_c: hz_to_rad(4.517e9),
            omega_m: hz_to_rad(707.4e3),
            kappa_e: hz_to_rad(145e3),
            kappa_i: hz_to_rad(156e3),
            gamma: hz_to_rad(8.8e-3),
            g0: hz_to_rad(10.0),
        }
    }

    /// Total cavity linewidth.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa_e + self.kappa_i
    }

    /// `ω_m/κ`.
    #[inline]
    pub fn sideband_resolution(&self) -> f64 {
        self.omega_m / self.kappa()
    }

    /// External coupling amplitude `β = √(κ_e/κ)`.
    #[inline]
    pub fn beta(&self) -> f64 {
        libm::sqrt(self.kappa_e / self.kappa())
    }

    /// Internal loss amplitude `α = √(κ_i/κ)`.
    #[inline]
    pub fn alpha(&self) -> f64 {
        libm::sqrt(self.kappa_i / self.kappa())
    }

    pub fn omega_m_hz(&self) -> f64 {
        rad_to_hz(self.omega_m)
    }

    pub fn gamma_hz(&self) -> f64 {
        rad_to_hz(self.gamma)
    }

    /// Stable 64-bit fingerprint of the parameter values (FNV-1a over the bit patterns).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in [self.omega_c, self.omega_m, self.kappa_e, self.kappa_i, self.gamma, self.g0] {
            for b in v.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }

    fn issues(&self) -> Vec<ConfigIssue> {
        let fields = [
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("kappa_e", self.kappa_e),
            ("kappa_i", self.kappa_i),
            ("gamma", self.gamma),
            ("g0", self.g0),
        ];
        fields
            .iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, v)| ConfigIssue::NotPositive { field: name, value: *v })
            .collect()
    }
}

/// The three pump regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    BadCavitySingleTone,
    RedSidebandSingleTone,
    TwoToneBae,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::BadCavitySingleTone, Regime::RedSidebandSingleTone, Regime::TwoToneBae];

    pub fn name(self) -> &'static str {
        match self {
            Regime::BadCavitySingleTone => "BadCavitySingleTone",
            Regime::RedSidebandSingleTone => "RedSidebandSingleTone",
            Regime::TwoToneBae => "TwoToneBAE",
        }
    }

    /// Whether the regime's closed forms assume `ω_m ≫ κ`.
    pub fn assumes_good_cavity(self) -> bool {
        !matches!(self, Regime::BadCavitySingleTone)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "BadCavitySingleTone" | "bad_cavity" => Ok(Regime::BadCavitySingleTone),
            "RedSidebandSingleTone" | "red_sideband" => Ok(Regime::RedSidebandSingleTone),
            "TwoToneBAE" | "TwoToneBae" | "bae" => Ok(Regime::TwoToneBae),
            other => Err(Error::UnknownRegime(String::from(other))),
        }
    }
}

/// Auxiliary red-sideband cooling tone used alongside the BAE tones.
///
/// `delta` is its offset from the red sideband; it must be nonzero so the
/// cooling process stays incommensurate with the BAE tones.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoolingTone {
    pub coupling: f64,
    pub delta: f64,
}

impl CoolingTone {
    /// Tone whose optical damping brings the total linewidth to `gamma_eff`.
    pub fn for_linewidth(params: &SystemParams, gamma_eff: f64, delta: f64) -> Result<Self> {
        if !(gamma_eff >= params.gamma) {
            return Err(Error::Domain(format!(
                "target linewidth {gamma_eff} rad/s is below the intrinsic damping {} rad/s",
                params.gamma
            )));
        }
        let coupling = libm::sqrt((gamma_eff - params.gamma) * params.kappa() / 4.0);
        Ok(Self { coupling, delta })
    }

    /// Optical damping of the cooling tone, `4G_c²/κ` (valid for `|δ| ≪ κ`).
    pub fn optical_damping(&self, params: &SystemParams) -> f64 {
        4.0 * self.coupling * self.coupling / params.kappa()
    }

    /// Cooperativity of the cooling tone.
    pub fn cooperativity(&self, params: &SystemParams) -> f64 {
        self.optical_damping(params) / params.gamma
    }
}

/// Which tones drive the cavity and how strongly. Couplings are the enhanced
/// couplings `G` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DriveScheme {
    /// Single tone; the closed forms additionally require `detuning == 0`.
    BadCavitySingleTone { coupling: f64, detuning: f64 },
    /// Single tone at `Δ = −ω_m`.
    RedSidebandSingleTone { coupling: f64 },
    /// Two equal-power tones at `ω_c ± ω_m`; `coupling` is per tone.
    TwoToneBae { coupling: f64, theta: f64, cooling: Option<CoolingTone> },
}

impl DriveScheme {
    pub fn bad_cavity(coupling: f64) -> Self {
        DriveScheme::BadCavitySingleTone { coupling, detuning: 0.0 }
    }

    pub fn red_sideband(coupling: f64) -> Self {
        DriveScheme::RedSidebandSingleTone { coupling }
    }

    pub fn bae(coupling: f64) -> Self {
        DriveScheme::TwoToneBae { coupling, theta: 0.0, cooling: None }
    }

    /// Drive of the given regime whose cooperativity is `c`.
    pub fn with_cooperativity(regime: Regime, params: &SystemParams, c: f64) -> Self {
        let g = libm::sqrt(c.max(0.0) * params.kappa() * params.gamma / 4.0);
        match regime {
            Regime::BadCavitySingleTone => Self::bad_cavity(g),
            Regime::RedSidebandSingleTone => Self::red_sideband(g),
            Regime::TwoToneBae => Self::bae(g),
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            DriveScheme::BadCavitySingleTone { .. } => Regime::BadCavitySingleTone,
            DriveScheme::RedSidebandSingleTone { .. } => Regime::RedSidebandSingleTone,
            DriveScheme::TwoToneBae { .. } => Regime::TwoToneBae,
        }
    }

    pub fn coupling(&self) -> f64 {
        match *self {
            DriveScheme::BadCavitySingleTone { coupling, .. }
            | DriveScheme::RedSidebandSingleTone { coupling }
            | DriveScheme::TwoToneBae { coupling, .. } => coupling,
        }
    }

    /// Pump detuning `Δ = ω_d − ω_c` for single-tone schemes.
    pub fn detuning(&self, params: &SystemParams) -> Option<f64> {
        match *self {
            DriveScheme::BadCavitySingleTone { detuning, .. } => Some(detuning),
            DriveScheme::RedSidebandSingleTone { .. } => Some(-params.omega_m),
            DriveScheme::TwoToneBae { .. } => None,
        }
    }

    pub fn theta(&self) -> f64 {
        match *self {
            DriveScheme::TwoToneBae { theta, .. } => theta,
            _ => 0.0,
        }
    }

    pub fn cooling(&self) -> Option<CoolingTone> {
        match *self {
            DriveScheme::TwoToneBae { cooling, .. } => cooling,
            _ => None,
        }
    }

    pub(crate) fn expect(&self, regime: Regime) -> Result<()> {
        if self.regime() == regime {
            Ok(())
        } else {
            Err(Error::WrongRegime { expected: regime, actual: self.regime() })
        }
    }
}

/// Thermal occupations of the mechanical bath and of the cavity's internal bath.
/// The external cavity bath is taken to be at zero temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct BathState {
    pub n_m_T: f64,
    pub n_I_T: f64,
    pub temperature: Option<f64>,
}

#[allow(non_snake_case)]
impl BathState {
    pub fn new(n_m_T: f64, n_I_T: f64) -> Result<Self> {
        for (name, v) in [("n_m_T", n_m_T), ("n_I_T", n_I_T)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { n_m_T, n_I_T, temperature: None })
    }

    /// Mechanical occupation from the Bose-Einstein distribution at `temperature` (K).
    pub fn at_temperature(params: &SystemParams, temperature: f64, n_I_T: f64) -> Result<Self> {
        let n_m_T = bose_occupation(temperature, params.omega_m)?;
        let mut bath = Self::new(n_m_T, n_I_T)?;
        bath.temperature = Some(temperature);
        Ok(bath)
    }

    /// Bath whose cavity thermal occupation `n_c^T` is the given value.
    pub fn with_cavity_occupation(params: &SystemParams, n_m_T: f64, n_c_T: f64) -> Result<Self> {
        Self::new(n_m_T, n_c_T * params.kappa() / params.kappa_i)
    }

    /// `n_c^T = n_I^T κ_i/κ`.
    pub fn n_c_T(&self, params: &SystemParams) -> f64 {
        self.n_I_T * params.kappa_i / params.kappa()
    }
}

/// Rates derived from the enhanced coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedRates {
    pub cooperativity: f64,
    pub gamma_opt: f64,
    pub gamma_eff: f64,
    /// Intracavity pump photon number implied by `G` and `g0`, when known.
    pub n_c: Option<f64>,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// `G = g0 √n_c`.
pub fn enhanced_coupling(g0: f64, n_c: f64) -> Result<f64> {
    require_positive("g0", g0)?;
    if !(n_c.is_finite() && n_c >= 0.0) {
        return Err(Error::Domain(format!("photon number must be finite and >= 0, got {n_c}")));
    }
    Ok(g0 * libm::sqrt(n_c))
}

/// `C = 4G²/(κγ)`.
pub fn cooperativity(coupling: f64, kappa: f64, gamma: f64) -> Result<f64> {
    require_positive("kappa", kappa)?;
    require_positive("gamma", gamma)?;
    Ok(4.0 * coupling * coupling / (kappa * gamma))
}

/// Optical damping `γ_opt = 4G²/κ` together with `γ_eff` and `C`.
pub fn optical_damping(coupling: f64, kappa: f64, gamma: f64) -> Result<DerivedRates> {
    let c = cooperativity(coupling, kappa, gamma)?;
    let gamma_opt = 4.0 * coupling * coupling / kappa;
    Ok(DerivedRates { cooperativity: c, gamma_opt, gamma_eff: gamma + gamma_opt, n_c: None })
}

impl DerivedRates {
    /// Derived rates of a drive on a device, including the implied photon number.
    pub fn of(params: &SystemParams, drive: &DriveScheme) -> Result<Self> {
        let g = drive.coupling();
        let mut rates = optical_damping(g, params.kappa(), params.gamma)?;
        rates.n_c = Some((g / params.g0) * (g / params.g0));
        Ok(rates)
    }
}

/// Bose-Einstein occupation `1/(exp(ħω/k_BT) − 1)` of a mode at `omega` (rad/s)
/// and temperature `t` (K).
pub fn bose_occupation(t: f64, omega: f64) -> Result<f64> {
    require_positive("temperature", t)?;
    require_positive("omega", omega)?;
    Ok(1.0 / libm::expm1(HBAR * omega / (K_B * t)))
}

/// `n_c^T = n_I^T κ_i/κ`.
pub fn cavity_thermal_occupation(n_internal: f64, kappa_i: f64, kappa: f64) -> Result<f64> {
    require_positive("kappa_i", kappa_i)?;
    require_positive("kappa", kappa)?;
    if kappa_i > kappa {
        return Err(Error::Domain(format!("kappa_i ({kappa_i}) exceeds the total linewidth kappa ({kappa})")));
    }
    if !(n_internal.is_finite() && n_internal >= 0.0) {
        return Err(Error::Domain(format!("n_I_T must be finite and >= 0, got {n_internal}")));
    }
    Ok(n_internal * kappa_i / kappa)
}

/// One failed configuration check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ConfigIssue {
    NotPositive { field: &'static str, value: f64 },
    NegativeCoupling { value: f64 },
    ZeroCoolingDetuning,
    NonFinite { field: &'static str },
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigIssue::NotPositive { field, value } => write!(f, "{field} must be > 0 (got {value})"),
            ConfigIssue::NegativeCoupling { value } => write!(f, "coupling G must be >= 0 (got {value})"),
            ConfigIssue::ZeroCoolingDetuning => f.write_str("cooling tone detuning delta must be nonzero"),
            ConfigIssue::NonFinite { field } => write!(f, "{field} must be finite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ConfigWarning {
    /// A regime assuming `ω_m ≫ κ` was requested with `ω_m/κ` below [`GOOD_CAVITY_MIN_RATIO`].
    UnresolvedSidebands,
}

/// A parameter set and drive that passed [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckedConfig {
    pub params: SystemParams,
    pub drive: DriveScheme,
    /// `ω_m/κ ≥ 2`.
    pub resolved_sidebands: bool,
    pub warning: Option<ConfigWarning>,
}

/// Checks every invariant of `p` and `d`, reporting all failures at once.
pub fn validate_params(p: &SystemParams, d: &DriveScheme) -> Result<CheckedConfig> {
    let mut issues = p.issues();
    let g = d.coupling();
    if !g.is_finite() {
        issues.push(ConfigIssue::NonFinite { field: "G" });
    } else if g < 0.0 {
        issues.push(ConfigIssue::NegativeCoupling { value: g });
    }
    match *d {
        DriveScheme::BadCavitySingleTone { detuning, .. } if !detuning.is_finite() => {
            issues.push(ConfigIssue::NonFinite { field: "delta" });
        }
        DriveScheme::TwoToneBae { theta, cooling, .. } => {
            if !theta.is_finite() {
                issues.push(ConfigIssue::NonFinite { field: "theta" });
            }
            if let Some(c) = cooling {
                if !c.coupling.is_finite() || c.coupling < 0.0 {
                    issues.push(ConfigIssue::NegativeCoupling { value: c.coupling });
                }
                if c.delta == 0.0 {
                    issues.push(ConfigIssue::ZeroCoolingDetuning);
                }
            }
        }
        _ => {}
    }
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    let resolved = p.sideband_resolution() >= GOOD_CAVITY_MIN_RATIO;
    let warning = (d.regime().assumes_good_cavity() && !resolved).then_some(ConfigWarning::UnresolvedSidebands);
    Ok(CheckedConfig { params: *p, drive: *d, resolved_sidebands: resolved, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn enhanced_coupling_examples() {
        let g0 = hz_to_rad(10.0);
        assert_eq!(enhanced_coupling(g0, 0.0).unwrap(), 0.0);
        assert!(rel(rad_to_hz(enhanced_coupling(g0, 1.0e4).unwrap()), 1000.0) < 1e-14);
        assert!(rel(rad_to_hz(enhanced_coupling(g0, 1.0).unwrap()), 10.0) < 1e-14);
        assert!(matches!(enhanced_coupling(g0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cooperativity_examples() {
        let kappa = hz_to_rad(301e3);
        let gamma = hz_to_rad(8.8e-3);
        assert_eq!(cooperativity(0.0, kappa, gamma).unwrap(), 0.0);
        // γ_opt/2π = 90 Hz against γ/2π = 8.8 mHz
        let c = hz_to_rad(90.0) / gamma;
        assert!(rel(c, 1.0227e4) < 1e-3);
        // G/2π = 100 Hz: 4·100²/(301e3·8.8e-3)
        let c = cooperativity(hz_to_rad(100.0), kappa, gamma).unwrap();
        assert!(rel(c, 15.101_177_891_875_565) < 1e-12, "{c}");
        assert!(cooperativity(1.0, 0.0, gamma).is_err());
        assert!(cooperativity(1.0, kappa, -1.0).is_err());
    }

    #[test]
    fn optical_damping_examples() {
        let kappa = hz_to_rad(301e3);
        let gamma = hz_to_rad(8.8e-3);
        let r = optical_damping(0.0, kappa, gamma).unwrap();
        assert_eq!(r.gamma_opt, 0.0);
        assert_eq!(r.gamma_eff, gamma);
        let r = optical_damping(hz_to_rad(46.6), kappa, gamma).unwrap();
        assert!((rad_to_hz(r.gamma_opt) - 0.0289).abs() < 5e-5, "{}", rad_to_hz(r.gamma_opt));
        // C ≈ 1.02e4 at γ/2π = 8.8 mHz gives γ_opt/2π ≈ 90 Hz
        let g = libm::sqrt(1.02e4 * kappa * gamma / 4.0);
        let r = optical_damping(g, kappa, gamma).unwrap();
        assert!(rel(rad_to_hz(r.gamma_opt), 90.0) < 0.01);
    }

    #[test]
    fn bose_occupation_examples() {
        let wm = hz_to_rad(707.4e3);
        let n37 = bose_occupation(0.037, wm).unwrap();
        assert!((n37 - 1089.343_033_822_250_8).abs() < 1e-6, "{n37}");
        let n25 = bose_occupation(0.025, wm).unwrap();
        assert!((n25 - 735.880_489_759_821_2).abs() < 1e-6, "{n25}");
        assert!(bose_occupation(1e-6, wm).unwrap() < 2e-15);
        assert!(bose_occupation(0.0, wm).is_err());
        assert!(bose_occupation(-1.0, wm).is_err());
    }

    #[test]
    fn cavity_thermal_occupation_examples() {
        let (ki, k) = (hz_to_rad(156e3), hz_to_rad(301e3));
        assert_eq!(cavity_thermal_occupation(0.0, ki, k).unwrap(), 0.0);
        assert!((cavity_thermal_occupation(1.0, ki, k).unwrap() - 156.0 / 301.0).abs() < 1e-15);
        assert_eq!(cavity_thermal_occupation(3.5, k, k).unwrap(), 3.5);
        assert!(cavity_thermal_occupation(1.0, 2.0 * k, k).is_err());
    }

    #[test]
    fn validate_membrane_device() {
        let p = SystemParams::membrane_device();
        assert!((p.omega_m_hz() - 707.4e3).abs() < 1e-6);
        assert!(rel(p.kappa() / TWO_PI, 301e3) < 1e-12);
        let cfg = validate_params(&p, &DriveScheme::red_sideband(1.0)).unwrap();
        assert!(cfg.resolved_sidebands);
        assert_eq!(cfg.warning, None);
    }

    #[test]
    fn validate_reports_every_failure() {
        let mut p = SystemParams::membrane_device();
        p.kappa_e = 0.0;
        p.gamma = f64::NAN;
        let err = validate_params(&p, &DriveScheme::bad_cavity(-1.0)).unwrap_err();
        match err {
            Error::Config(issues) => assert_eq!(issues.len(), 3, "{issues:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_flags_unresolved_good_cavity() {
        let p = SystemParams::from_hz(4.517e9, 100e3, 145e3, 156e3, 8.8e-3, 10.0).unwrap();
        let cfg = validate_params(&p, &DriveScheme::red_sideband(1.0)).unwrap();
        assert!(!cfg.resolved_sidebands);
        assert_eq!(cfg.warning, Some(ConfigWarning::UnresolvedSidebands));
        // no warning for the regime that expects a fast cavity
        let cfg = validate_params(&p, &DriveScheme::bad_cavity(1.0)).unwrap();
        assert_eq!(cfg.warning, None);
    }

    #[test]
    fn cooling_tone_needs_detuning() {
        let p = SystemParams::membrane_device();
        let cooling = CoolingTone { coupling: 1.0, delta: 0.0 };
        let d = DriveScheme::TwoToneBae { coupling: 1.0, theta: 0.0, cooling: Some(cooling) };
        assert!(validate_params(&p, &d).is_err());
        let tone = CoolingTone::for_linewidth(&p, hz_to_rad(2.9), hz_to_rad(400.0)).unwrap();
        assert!(rel(p.gamma + tone.optical_damping(&p), hz_to_rad(2.9)) < 1e-12);
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("TwoToneBAE".parse::<Regime>().unwrap(), Regime::TwoToneBae);
        assert!(matches!("blue".parse::<Regime>(), Err(Error::UnknownRegime(_))));
    }

    #[test]
    fn bath_cavity_occupation() {
        let p = SystemParams::membrane_device();
        let b = BathState::with_cavity_occupation(&p, 10.0, 0.2).unwrap();
        assert!(rel(b.n_c_T(&p), 0.2) < 1e-14);
        let b = BathState::at_temperature(&p, 0.037, 0.0).unwrap();
        assert!((b.n_m_T - 1089.34).abs() < 0.01);
    }
}
