//! Calibration of measured sweeps into physical quantities.
//!
//! Four proportionality constants connect what is recorded to the model:
//!
//! * `ℒ` (`damping_per_power`): optical damping per unit generator power,
//!   `γ_opt = ℒP`, so `C(P) = ℒP/γ`;
//! * `𝒥 = ℒκ/4` (`coupling_per_power`): `G² = 𝒥P`;
//! * `ℋ` (`flux_per_kelvin`): detected flux per kelvin in the thermal regime;
//! * `𝒩` (`flux_per_cooperativity`): detected flux per unit cooperativity in
//!   the linear regime of a BAE power sweep.
//!
//! The chain gain multiplies every detected flux and so cancels between
//! `ℋ` or `𝒩` and the data they are applied to. Uncertainties are first-order
//! (delta method); [`monte_carlo_propagation`] is available as a cross-check.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::{hz_to_rad, HBAR, K_B};
use crate::error::{Error, Result};
use crate::fit::{fit_linear_through_origin, LinearFit, LorentzianFit};
use crate::params::{bose_occupation, SystemParams};
use crate::spectra::variance_good_cavity;

/// A point excluded or flagged during a calibration stage.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationWarning {
    pub index: Option<usize>,
    pub message: String,
}

impl CalibrationWarning {
    fn at(index: usize, message: String) -> Self {
        Self { index: Some(index), message }
    }
}

/// Measured linewidth of a single red-sideband tone at generator power `power`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinewidthPoint {
    pub power: f64,
    /// Fitted FWHM, rad/s.
    pub gamma_eff: f64,
    pub gamma_eff_se: f64,
}

impl LinewidthPoint {
    pub fn from_fit(power: f64, fit: &LorentzianFit) -> Self {
        Self { power, gamma_eff: hz_to_rad(fit.linewidth_hz), gamma_eff_se: hz_to_rad(fit.linewidth_se) }
    }
}

/// Detected peak area at one sweep setting (temperature or cooperativity).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluxPoint {
    pub axis: f64,
    pub flux: f64,
    pub flux_se: f64,
}

impl FluxPoint {
    pub fn from_fit(axis: f64, fit: &LorentzianFit) -> Self {
        Self { axis, flux: fit.area, flux_se: fit.area_se }
    }
}

/// Relative floor on standard errors used as weights, so that noiseless
/// inputs are not judged on rounding error.
const SE_FLOOR: f64 = 1e-9;

fn weights_from_se(pairs: impl Iterator<Item = (f64, f64)>) -> Option<Vec<f64>> {
    let w: Vec<f64> = pairs
        .map(|(se, value)| {
            let s = se.max(SE_FLOOR * libm::fabs(value));
            1.0 / (s * s)
        })
        .collect();
    w.iter().all(|v| v.is_finite() && *v > 0.0).then_some(w)
}

fn rel2(se: f64, value: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        (se / value) * (se / value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PumpPoint {
    pub power: f64,
    /// `γ_eff − γ`, rad/s.
    pub gamma_opt: f64,
    pub gamma_opt_se: f64,
    /// `ℒP/γ`.
    pub cooperativity: f64,
    pub used: bool,
}

/// Result of [`calibrate_pump`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PumpCalibration {
    /// `ℒ`, rad/s per power unit.
    pub damping_per_power: f64,
    pub damping_per_power_se: f64,
    /// `𝒥 = ℒκ/4`, rad²/s² per power unit.
    pub coupling_per_power: f64,
    pub coupling_per_power_se: f64,
    /// Intrinsic damping used to form `γ_opt` and `C`, rad/s.
    pub gamma: f64,
    pub fit: LinearFit,
    pub points: Vec<PumpPoint>,
    pub warnings: Vec<CalibrationWarning>,
}

impl PumpCalibration {
    /// `C(P) = ℒP/γ`.
    pub fn cooperativity(&self, power: f64) -> f64 {
        self.damping_per_power * power / self.gamma
    }

    pub fn cooperativity_se(&self, power: f64) -> f64 {
        self.damping_per_power_se * power / self.gamma
    }
}

/// Fits `γ_opt = ℒP` through the origin, weighting points by their linewidth
/// errors. Points with `γ_opt < 0` are excluded with a warning.
pub fn calibrate_pump(points: &[LinewidthPoint], params: &SystemParams) -> Result<PumpCalibration> {
    let gamma = params.gamma;
    let mut warnings = Vec::new();
    let mut used = Vec::new();
    for (k, p) in points.iter().enumerate() {
        if !(p.power.is_finite() && p.power >= 0.0 && p.gamma_eff.is_finite()) {
            return Err(Error::Calibration(alloc::format!("pump point {k} is not finite: {p:?}")));
        }
        if p.gamma_eff - gamma < 0.0 {
            warnings.push(CalibrationWarning::at(k, alloc::format!("negative optical damping at P = {}; excluded", p.power)));
        } else {
            used.push(k);
        }
    }
    if used.len() < 2 {
        return Err(Error::Calibration(alloc::format!("pump sweep has {} usable points, need 2", used.len())));
    }
    let xs: Vec<f64> = used.iter().map(|&k| points[k].power).collect();
    let ys: Vec<f64> = used.iter().map(|&k| points[k].gamma_eff - gamma).collect();
    let w = weights_from_se(used.iter().map(|&k| (points[k].gamma_eff_se, points[k].gamma_eff - gamma)));
    let fit = fit_linear_through_origin(&xs, &ys, w.as_deref()).map_err(|e| Error::Calibration(alloc::format!("{e}")))?;
    if !(fit.slope > 0.0) {
        return Err(Error::Calibration(alloc::format!("optical damping slope {} is not positive", fit.slope)));
    }
    let kappa = params.kappa();
    let cal_points = points
        .iter()
        .enumerate()
        .map(|(k, p)| PumpPoint {
            power: p.power,
            gamma_opt: p.gamma_eff - gamma,
            gamma_opt_se: p.gamma_eff_se,
            cooperativity: fit.slope * p.power / gamma,
            used: used.contains(&k),
        })
        .collect();
    Ok(PumpCalibration {
        damping_per_power: fit.slope,
        damping_per_power_se: fit.slope_se,
        coupling_per_power: fit.slope * kappa / 4.0,
        coupling_per_power_se: fit.slope_se * kappa / 4.0,
        gamma,
        fit,
        points: cal_points,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct TemperaturePoint {
    pub temperature_k: f64,
    pub flux: f64,
    pub flux_se: f64,
    /// Inferred bath occupation.
    pub n_m_T: f64,
    pub n_m_T_se: f64,
    /// Bose occupation at the cryostat temperature.
    pub bose: f64,
    pub in_band: bool,
    /// Inferred occupation exceeds the Bose value by more than three standard errors.
    pub decoupled: bool,
}

/// Result of [`calibrate_temperature_sweep`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemperatureCalibration {
    /// `ℋ`, detected flux per kelvin.
    pub flux_per_kelvin: f64,
    pub flux_per_kelvin_se: f64,
    pub band_k: (f64, f64),
    pub fit: LinearFit,
    pub points: Vec<TemperaturePoint>,
    pub warnings: Vec<CalibrationWarning>,
}

/// Default thermalised band, K.
pub const DEFAULT_FIT_BAND_K: (f64, f64) = (0.2, 0.5);

/// Fits `flux = ℋT` over the points inside `band_k` and inverts every point
/// to an occupation, `n_m^T = flux·k_B/(ℋħω_m) − 1/2`.
///
/// The measured quadrature energy is `n_m^T + 1/2`, which equals `k_BT/ħω_m`
/// to second order in `ħω_m/k_BT`; subtracting the half quantum makes the
/// inversion exact in that limit.
pub fn calibrate_temperature_sweep(
    points: &[FluxPoint],
    params: &SystemParams,
    band_k: (f64, f64),
) -> Result<TemperatureCalibration> {
    if !(band_k.0 < band_k.1) {
        return Err(Error::Calibration(alloc::format!("invalid fit band {band_k:?}")));
    }
    let in_band: Vec<usize> = (0..points.len())
        .filter(|&k| points[k].axis >= band_k.0 && points[k].axis <= band_k.1)
        .collect();
    if in_band.len() < 2 {
        return Err(Error::Calibration(alloc::format!(
            "{} points inside the {}-{} K band, need 2",
            in_band.len(),
            band_k.0,
            band_k.1
        )));
    }
    let xs: Vec<f64> = in_band.iter().map(|&k| points[k].axis).collect();
    let ys: Vec<f64> = in_band.iter().map(|&k| points[k].flux).collect();
    let w = weights_from_se(in_band.iter().map(|&k| (points[k].flux_se, points[k].flux)));
    let fit = fit_linear_through_origin(&xs, &ys, w.as_deref()).map_err(|e| Error::Calibration(alloc::format!("{e}")))?;
    let h = fit.slope;
    if !(h > 0.0) {
        return Err(Error::Calibration(alloc::format!("flux per kelvin {h} is not positive")));
    }
    let quantum = HBAR * params.omega_m / K_B;
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        let energy = p.flux / (h * quantum);
        let energy_se = libm::fabs(energy) * libm::sqrt(rel2(p.flux_se, p.flux) + rel2(fit.slope_se, h));
        let n = energy - 0.5;
        let bose = bose_occupation(p.axis, params.omega_m)?;
        let decoupled = n - bose > 3.0 * energy_se;
        if decoupled {
            warnings.push(CalibrationWarning::at(
                k,
                alloc::format!("mode not thermalised at {} K: n = {n:.1}, Bose value {bose:.1}", p.axis),
            ));
        }
        out.push(TemperaturePoint {
            temperature_k: p.axis,
            flux: p.flux,
            flux_se: p.flux_se,
            n_m_T: n,
            n_m_T_se: energy_se,
            bose,
            in_band: in_band.contains(&k),
            decoupled,
        });
    }
    Ok(TemperatureCalibration {
        flux_per_kelvin: h,
        flux_per_kelvin_se: fit.slope_se,
        band_k,
        fit,
        points: out,
        warnings,
    })
}

/// How the bath occupation at base temperature is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BaseOccupation {
    /// Mean of the inferred occupations of the two coldest points.
    #[default]
    TwoLowest,
    /// The thermal line `ℋT` evaluated at the base temperature; assumes the
    /// mode is thermalised there.
    HighTempFit,
}

/// Bath occupation at base temperature and its standard error.
pub fn base_occupation(
    cal: &TemperatureCalibration,
    estimator: BaseOccupation,
    params: &SystemParams,
    base_temperature_k: Option<f64>,
) -> Result<(f64, f64)> {
    match estimator {
        BaseOccupation::TwoLowest => {
            let mut pts: Vec<&TemperaturePoint> = cal.points.iter().collect();
            if pts.len() < 2 {
                return Err(Error::Calibration(String::from("need two temperature points for the base occupation")));
            }
            pts.sort_by(|a, b| a.temperature_k.total_cmp(&b.temperature_k));
            let n = 0.5 * (pts[0].n_m_T + pts[1].n_m_T);
            let se = 0.5 * libm::hypot(pts[0].n_m_T_se, pts[1].n_m_T_se);
            Ok((n, se))
        }
        BaseOccupation::HighTempFit => {
            let t = base_temperature_k
                .ok_or_else(|| Error::Calibration(String::from("base temperature unknown for the thermal-line estimate")))?;
            // ℋ cancels: the line at T inverts to k_BT/ħω_m
            let energy = K_B * t / (HBAR * params.omega_m);
            Ok((energy - 0.5, 0.0))
        }
    }
}

/// Reference energy of the measured quadrature, `⟨X²⟩₀`, for a mode whose
/// linewidth is widened by a cooling tone of cooperativity `c_cool` (zero
/// without one).
#[allow(non_snake_case)]
pub fn reference_quadrature_energy(c_cool: f64, n_m_T: (f64, f64), n_c_T: f64) -> Result<(f64, f64)> {
    let x2 = variance_good_cavity(c_cool, n_m_T.0.max(0.0), n_c_T)?.total_first();
    Ok((x2, n_m_T.1 / (1.0 + c_cool)))
}

/// Choice of the low-cooperativity points that define `𝒩`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LinearWindow {
    /// The longest run of lowest-`C` points, at least three, whose origin fit
    /// has reduced χ² within the limit.
    Auto { max_reduced_chi2: f64 },
    /// The `k` lowest-`C` points.
    Fixed(usize),
}

impl Default for LinearWindow {
    fn default() -> Self {
        LinearWindow::Auto { max_reduced_chi2: 2.0 }
    }
}

/// One point of a BAE power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaeFluxPoint {
    pub cooperativity: f64,
    pub flux: f64,
    pub flux_se: f64,
    pub linewidth_hz: f64,
    pub linewidth_se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadraturePoint {
    pub cooperativity: f64,
    pub flux: f64,
    pub flux_se: f64,
    pub linewidth_hz: f64,
    pub linewidth_se: f64,
    /// `⟨X²⟩ = flux·⟨X²⟩₀/(𝒩C)`.
    pub x2: f64,
    pub x2_se: f64,
    pub in_window: bool,
}

/// Result of [`calibrate_bae_flux`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaeFluxCalibration {
    /// `𝒩`, detected flux per unit cooperativity.
    pub flux_per_cooperativity: f64,
    pub flux_per_cooperativity_se: f64,
    pub x2_ref: f64,
    pub x2_ref_se: f64,
    pub window: usize,
    pub fit: LinearFit,
    /// Points sorted by cooperativity.
    pub points: Vec<QuadraturePoint>,
}

fn window_fit(pts: &[BaeFluxPoint], k: usize) -> Result<LinearFit> {
    let xs: Vec<f64> = pts[..k].iter().map(|p| p.cooperativity).collect();
    let ys: Vec<f64> = pts[..k].iter().map(|p| p.flux).collect();
    let w = weights_from_se(pts[..k].iter().map(|p| (p.flux_se, p.flux)));
    fit_linear_through_origin(&xs, &ys, w.as_deref()).map_err(|e| Error::Calibration(alloc::format!("{e}")))
}

/// Fits `flux = 𝒩C` over the linear window and converts every point to a
/// quadrature energy. `x2_ref` is `(⟨X²⟩₀, standard error)`.
pub fn calibrate_bae_flux(points: &[BaeFluxPoint], x2_ref: (f64, f64), window: LinearWindow) -> Result<BaeFluxCalibration> {
    if points.iter().any(|p| !(p.cooperativity > 0.0 && p.cooperativity.is_finite() && p.flux.is_finite())) {
        return Err(Error::Calibration(String::from("BAE points need positive finite cooperativities and fluxes")));
    }
    if !(x2_ref.0 > 0.0) {
        return Err(Error::Calibration(alloc::format!("reference energy {} is not positive", x2_ref.0)));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.cooperativity.total_cmp(&b.cooperativity));
    let (k, fit) = match window {
        LinearWindow::Fixed(k) => {
            if k < 1 || k > pts.len() {
                return Err(Error::Calibration(alloc::format!("window of {k} points for a sweep of {}", pts.len())));
            }
            (k, window_fit(&pts, k)?)
        }
        LinearWindow::Auto { max_reduced_chi2 } => {
            if pts.len() < 3 {
                return Err(Error::Calibration(alloc::format!("need at least 3 points to find a linear regime, got {}", pts.len())));
            }
            let mut best: Option<(usize, LinearFit)> = None;
            let mut lowest = f64::INFINITY;
            for k in 3..=pts.len() {
                let fit = window_fit(&pts, k)?;
                lowest = lowest.min(fit.reduced_chi2);
                if fit.reduced_chi2 <= max_reduced_chi2 {
                    best = Some((k, fit));
                }
            }
            let Some((k, best)) = best else {
                return Err(Error::Calibration(alloc::format!(
                    "no linear regime: every prefix of at least 3 points has reduced chi2 above {max_reduced_chi2} (lowest {lowest:.2})"
                )));
            };
            (k, best)
        }
    };
    let n = fit.slope;
    if !(n > 0.0) {
        return Err(Error::Calibration(alloc::format!("flux per cooperativity {n} is not positive")));
    }
    let quad = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x2 = p.flux * x2_ref.0 / (n * p.cooperativity);
            let rel = rel2(p.flux_se, p.flux) + rel2(fit.slope_se, n) + rel2(x2_ref.1, x2_ref.0);
            QuadraturePoint {
                cooperativity: p.cooperativity,
                flux: p.flux,
                flux_se: p.flux_se,
                linewidth_hz: p.linewidth_hz,
                linewidth_se: p.linewidth_se,
                x2,
                x2_se: libm::fabs(x2) * libm::sqrt(rel),
                in_window: i < k,
            }
        })
        .collect();
    Ok(BaeFluxCalibration {
        flux_per_cooperativity: n,
        flux_per_cooperativity_se: fit.slope_se,
        x2_ref: x2_ref.0,
        x2_ref_se: x2_ref.1,
        window: k,
        fit,
        points: quad,
    })
}

/// One calibrated point against the backaction models.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvasionPoint {
    pub cooperativity: f64,
    pub x2: f64,
    pub x2_se: f64,
    /// Ideal BAE: `⟨X²⟩₀`.
    pub model_flat: f64,
    /// Unresolved sidebands: `⟨X²⟩₀ + C`.
    pub model_bad: f64,
    /// Sideband cooling: `⟨X²⟩₀ + C/2`.
    pub model_good: f64,
    /// The conjugate BAE quadrature: `⟨X²⟩₀ + 2C`.
    pub model_bae_p: f64,
    pub below_bad: bool,
    pub below_good: bool,
    pub below_bae_p: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvasionReport {
    pub x2_ref: f64,
    pub points: Vec<EvasionPoint>,
    pub below_bad: bool,
    pub below_good: bool,
    pub below_bae_p: bool,
    /// Every point lies below the smallest backaction curve (`+C/2`) by
    /// more than its standard error.
    pub evasion_demonstrated: bool,
}

/// Compares calibrated `⟨X²⟩(C)` with the backaction each regime would add.
/// A point is below a curve when the gap exceeds its standard error.
pub fn evaluate_bae_evasion(points: &[QuadraturePoint], x2_ref: f64) -> EvasionReport {
    let out: Vec<EvasionPoint> = points
        .iter()
        .map(|p| {
            let c = p.cooperativity;
            let below = |model: f64| model - p.x2 > p.x2_se;
            let (bad, good, bae_p) = (x2_ref + c, x2_ref + 0.5 * c, x2_ref + 2.0 * c);
            EvasionPoint {
                cooperativity: c,
                x2: p.x2,
                x2_se: p.x2_se,
                model_flat: x2_ref,
                model_bad: bad,
                model_good: good,
                model_bae_p: bae_p,
                below_bad: below(bad),
                below_good: below(good),
                below_bae_p: below(bae_p),
            }
        })
        .collect();
    let all = |f: fn(&EvasionPoint) -> bool| !out.is_empty() && out.iter().all(f);
    let below_good = all(|p| p.below_good);
    EvasionReport {
        x2_ref,
        below_bad: all(|p| p.below_bad),
        below_good,
        below_bae_p: all(|p| p.below_bae_p),
        evasion_demonstrated: below_good,
        points: out,
    }
}

/// Calibration constants of a full run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct CalibrationResult {
    /// `ℒ`, rad/s per power unit.
    pub damping_per_power: f64,
    pub damping_per_power_se: f64,
    /// `𝒥 = ℒκ/4`, rad²/s² per power unit.
    pub coupling_per_power: f64,
    pub coupling_per_power_se: f64,
    /// `ℋ`, detected flux per kelvin.
    pub flux_per_kelvin: f64,
    pub flux_per_kelvin_se: f64,
    /// `𝒩`, detected flux per unit cooperativity.
    pub flux_per_cooperativity: f64,
    pub flux_per_cooperativity_se: f64,
    /// Bath occupation at base temperature.
    pub n_m_T0: f64,
    pub n_m_T0_se: f64,
    /// Cooperativity of the cooling tone used for `⟨X²⟩₀`.
    pub cooling_cooperativity: f64,
    /// `⟨X²⟩₀`, quanta.
    pub x2_ref: f64,
    pub x2_ref_se: f64,
}

impl CalibrationResult {
    /// `ℒ/2π`, Hz per power unit.
    pub fn damping_per_power_hz(&self) -> f64 {
        crate::constants::rad_to_hz(self.damping_per_power)
    }
}

/// Mean and standard deviation of `f` over Gaussian draws of its inputs.
pub fn monte_carlo_propagation<F>(f: F, means: &[f64], ses: &[f64], samples: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if means.len() != ses.len() || samples < 2 {
        return Err(Error::Domain(String::from("Monte-Carlo propagation needs matching inputs and >= 2 samples")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = means.to_vec();
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..samples {
        for j in 0..means.len() {
            let z: f64 = StandardNormal.sample(&mut rng);
            x[j] = means[j] + ses[j] * z;
        }
        let v = f(&x);
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    Ok((mean, libm::sqrt(m2 / (samples - 1) as f64)))
}
