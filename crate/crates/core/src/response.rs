//! Complex susceptibilities and input→output transduction coefficients.
//!
//! Two independent routes are provided for every regime: the closed
//! forms (`transduction_*`) and [`solve_linear_response`], which builds the
//! 4×4 frequency-domain equations of motion and solves them numerically at
//! each frequency without regime-specific shortcuts.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::solve_complex;
use crate::params::{DriveScheme, Regime, SystemParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `χ_m(ω) = 1/(Γ/2 − iω)` for a damping rate `Γ`.
#[inline]
pub fn chi_lorentz(rate: f64, omega: f64) -> Complex64 {
    Complex64::new(rate / 2.0, -omega).inv()
}

/// `χ′(ω) = 1/((Γ/2 − iω)² + ω_m²)`.
#[inline]
pub fn chi_prime(rate: f64, omega_m: f64, omega: f64) -> Complex64 {
    let a = Complex64::new(rate / 2.0, -omega);
    (a * a + omega_m * omega_m).inv()
}

/// Susceptibilities at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSusceptibilities {
    pub omega: f64,
    pub chi_m: Complex64,
    pub chi_c: Complex64,
    pub chi_m_prime: Complex64,
    /// `χ′` with the effective linewidth `γ_eff`.
    pub chi_e_prime: Complex64,
}

impl ComplexSusceptibilities {
    pub fn at(params: &SystemParams, gamma_eff: f64, omega: f64) -> Self {
        Self {
            omega,
            chi_m: chi_lorentz(params.gamma, omega),
            chi_c: chi_lorentz(params.kappa(), omega),
            chi_m_prime: chi_prime(params.gamma, params.omega_m, omega),
            chi_e_prime: chi_prime(gamma_eff, params.omega_m, omega),
        }
    }
}

/// Susceptibilities sampled on a grid of angular frequencies.
pub fn susceptibilities(params: &SystemParams, gamma_eff: f64, omegas: &[f64]) -> Vec<ComplexSusceptibilities> {
    omegas.iter().map(|&w| ComplexSusceptibilities::at(params, gamma_eff, w)).collect()
}

/// Dynamical variables (and the output field) a coefficient maps onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    /// Lab-frame mechanical position.
    X,
    /// Lab-frame mechanical momentum.
    P,
    /// Rotating-frame mechanical quadrature `X`.
    QuadX,
    /// Rotating-frame mechanical quadrature `P`.
    QuadP,
    Xc,
    Pc,
    PcOut,
}

impl Output {
    pub const ALL: [Output; 7] =
        [Output::X, Output::P, Output::QuadX, Output::QuadP, Output::Xc, Output::Pc, Output::PcOut];

    #[inline]
    fn index(self) -> usize {
        self as usize
    }
}

/// Input noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Input {
    /// Lab-frame mechanical bath, position quadrature (`x_in`).
    XIn,
    /// Lab-frame mechanical bath, momentum quadrature (`p_in`).
    PIn,
    /// Rotating-frame mechanical bath, `X_in`.
    QuadXIn,
    /// Rotating-frame mechanical bath, `P_in`.
    QuadPIn,
    /// External cavity port.
    XcIn,
    PcIn,
    /// Internal cavity loss channel.
    XcInI,
    PcInI,
}

impl Input {
    pub const ALL: [Input; 8] = [
        Input::XIn,
        Input::PIn,
        Input::QuadXIn,
        Input::QuadPIn,
        Input::XcIn,
        Input::PcIn,
        Input::XcInI,
        Input::PcInI,
    ];

    #[inline]
    fn index(self) -> usize {
        self as usize
    }

    pub fn bath(self) -> Bath {
        match self {
            Input::XIn | Input::PIn | Input::QuadXIn | Input::QuadPIn => Bath::Mechanical,
            Input::XcIn | Input::PcIn => Bath::CavityExternal,
            Input::XcInI | Input::PcInI => Bath::CavityInternal,
        }
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bath {
    Mechanical,
    CavityExternal,
    CavityInternal,
}

/// A white input noise channel with symmetrized density `1/2 + n^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannelSpec {
    pub input: Input,
    pub density: f64,
}

impl NoiseChannelSpec {
    pub fn new(input: Input, thermal_occupation: f64) -> Self {
        Self { input, density: 0.5 + thermal_occupation.max(0.0) }
    }

    /// The six channels of a single-tone or BAE model: mechanical bath at
    /// `n_m`, external port at zero temperature, internal bath at `n_I`.
    #[allow(non_snake_case)]
    pub fn standard(regime: Regime, n_m_T: f64, n_I_T: f64) -> [NoiseChannelSpec; 6] {
        let (xin, pin) = match regime {
            Regime::TwoToneBae => (Input::QuadXIn, Input::QuadPIn),
            _ => (Input::XIn, Input::PIn),
        };
        [
            Self::new(xin, n_m_T),
            Self::new(pin, n_m_T),
            Self::new(Input::XcIn, 0.0),
            Self::new(Input::PcIn, 0.0),
            Self::new(Input::XcInI, n_I_T),
            Self::new(Input::PcInI, n_I_T),
        ]
    }

    pub fn bath(&self) -> Bath {
        self.input.bath()
    }
}

/// Transduction coefficients `output ← input` at one frequency. Entries not
/// set by the producing routine are exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransductionSet {
    pub omega: f64,
    coeffs: [[Complex64; 8]; 7],
}

impl TransductionSet {
    pub fn zeros(omega: f64) -> Self {
        Self { omega, coeffs: [[Complex64::new(0.0, 0.0); 8]; 7] }
    }

    #[inline]
    pub fn get(&self, out: Output, inp: Input) -> Complex64 {
        self.coeffs[out.index()][inp.index()]
    }

    #[inline]
    pub fn set(&mut self, out: Output, inp: Input, v: Complex64) {
        self.coeffs[out.index()][inp.index()] = v;
    }

    /// Every `(output, input)` pair with a nonzero coefficient.
    pub fn nonzero(&self) -> impl Iterator<Item = (Output, Input, Complex64)> + '_ {
        Output::ALL.into_iter().flat_map(move |o| {
            Input::ALL.into_iter().filter_map(move |i| {
                let v = self.get(o, i);
                (v != Complex64::new(0.0, 0.0)).then_some((o, i, v))
            })
        })
    }

    /// `Σ_z |T_{out←z}|² (1/2 + n_z)` over the given channels.
    pub fn spectral_density(&self, out: Output, channels: &[NoiseChannelSpec]) -> f64 {
        channels.iter().map(|ch| self.get(out, ch.input).norm_sqr() * ch.density).sum()
    }

    /// Rotates the measured cavity quadratures by the pump phase difference:
    /// `X_c^θ = X_c cos θ + P_c sin θ`, `P_c^θ = −X_c sin θ + P_c cos θ`.
    /// Mechanical rows and the output field are untouched.
    pub fn rotate_cavity_basis(&self, theta: f64) -> Self {
        if theta == 0.0 {
            return *self;
        }
        let (s, c) = libm::sincos(theta);
        let mut out = *self;
        for inp in Input::ALL {
            let xc = self.get(Output::Xc, inp);
            let pc = self.get(Output::Pc, inp);
            out.set(Output::Xc, inp, xc * c + pc * s);
            out.set(Output::Pc, inp, -xc * s + pc * c);
        }
        out
    }
}

/// Form used for the cavity susceptibility inside the BAE closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CavitySusceptibility {
    /// `χ_c → 2/κ`, the fast-cavity substitution used to reach the spectra.
    #[default]
    OnResonance,
    /// Frequency-dependent `χ_c(ω) = 1/(κ/2 − iω)`.
    Exact,
}

/// Bad-cavity (`κ ≫ ω_m`) coefficients for a single tone at zero detuning.
/// Mechanical rows only; the cavity is eliminated with `χ_c = 2/κ`.
pub fn transduction_bad_cavity(omega: f64, params: &SystemParams, drive: &DriveScheme) -> Result<TransductionSet> {
    drive.expect(Regime::BadCavitySingleTone)?;
    if drive.detuning(params) != Some(0.0) {
        return Err(Error::Domain(alloc::format!(
            "bad-cavity closed form requires zero detuning, got {:?}",
            drive.detuning(params)
        )));
    }
    let g = drive.coupling();
    let (wm, sg) = (params.omega_m, libm::sqrt(params.gamma));
    let chi = chi_prime(params.gamma, wm, omega);
    // √(4Cγ) = 4G/√κ
    let ba = 4.0 * g / libm::sqrt(params.kappa());
    let (alpha, beta) = (params.alpha(), params.beta());

    let mut t = TransductionSet::zeros(omega);
    t.set(Output::X, Input::XIn, I * sg * omega * chi);
    t.set(Output::P, Input::PIn, I * sg * omega * chi);
    t.set(Output::X, Input::PIn, re(sg * wm) * chi);
    t.set(Output::P, Input::XIn, re(-sg * wm) * chi);
    t.set(Output::X, Input::XcIn, re(-ba * beta * wm) * chi);
    t.set(Output::X, Input::XcInI, re(-ba * alpha * wm) * chi);
    t.set(Output::P, Input::XcIn, I * ba * beta * omega * chi);
    t.set(Output::P, Input::XcInI, I * ba * alpha * omega * chi);
    Ok(t)
}

/// Resolved-sideband (`κ ≪ ω_m`) coefficients for a red-sideband tone.
///
/// Mechanical self-coefficients carry the effective linewidth
/// `γ_eff = γ + 4G²/κ`. Momentum backaction coefficients follow the position
/// ones through `p ≈ −(iω/ω_m)·x` for a force on `p`; they are checked
/// against [`solve_linear_response`] in the tests.
pub fn transduction_good_cavity(omega: f64, params: &SystemParams, drive: &DriveScheme) -> Result<TransductionSet> {
    drive.expect(Regime::RedSidebandSingleTone)?;
    let g = drive.coupling();
    let kappa = params.kappa();
    let gamma_eff = params.gamma + 4.0 * g * g / kappa;
    let (wm, sg) = (params.omega_m, libm::sqrt(params.gamma));
    let chi = chi_prime(gamma_eff, wm, omega);
    let k = 2.0 * g / libm::sqrt(kappa);
    let (alpha, beta) = (params.alpha(), params.beta());

    let mut t = TransductionSet::zeros(omega);
    t.set(Output::X, Input::XIn, I * sg * omega * chi);
    t.set(Output::P, Input::PIn, I * sg * omega * chi);
    t.set(Output::X, Input::PIn, re(sg * wm) * chi);
    t.set(Output::P, Input::XIn, re(-sg * wm) * chi);

    for (amp, xin, pin) in [(beta, Input::XcIn, Input::PcIn), (alpha, Input::XcInI, Input::PcInI)] {
        t.set(Output::X, xin, -I * k * amp * wm * chi);
        t.set(Output::X, pin, re(k * amp * omega) * chi);
        t.set(Output::P, xin, re(-k * amp * omega) * chi);
        t.set(Output::P, pin, -I * k * amp * wm * chi);
    }
    Ok(t)
}

/// Two-tone BAE coefficients in the rotating quadrature frame.
///
/// `X` has no backaction channel. Cavity rows follow from
/// `X_c = χ_c(√κ_e X_c,in + √κ_i X_c,inI)`, `P_c = 2Gχ_c X + χ_c(√κ_e P_c,in + √κ_i P_c,inI)`
/// and `P_c,out = √κ_e P_c − P_c,in`.
pub fn transduction_bae(
    omega: f64,
    params: &SystemParams,
    drive: &DriveScheme,
    cavity: CavitySusceptibility,
) -> Result<TransductionSet> {
    drive.expect(Regime::TwoToneBae)?;
    let g = drive.coupling();
    let chi_m = chi_lorentz(params.gamma, omega);
    let chi_c = match cavity {
        CavitySusceptibility::OnResonance => re(2.0 / params.kappa()),
        CavitySusceptibility::Exact => chi_lorentz(params.kappa(), omega),
    };
    let (sg, ske, ski) = (libm::sqrt(params.gamma), libm::sqrt(params.kappa_e), libm::sqrt(params.kappa_i));

    let mut t = TransductionSet::zeros(omega);
    let x_x = chi_m * sg;
    t.set(Output::QuadX, Input::QuadXIn, x_x);
    t.set(Output::QuadP, Input::QuadPIn, chi_m * sg);
    t.set(Output::QuadP, Input::XcIn, chi_m * chi_c * (-2.0 * g * ske));
    t.set(Output::QuadP, Input::XcInI, chi_m * chi_c * (-2.0 * g * ski));

    t.set(Output::Xc, Input::XcIn, chi_c * ske);
    t.set(Output::Xc, Input::XcInI, chi_c * ski);
    let pc_x = bae_cavity_from_mechanics(params, drive, omega, cavity);
    t.set(Output::Pc, Input::QuadXIn, pc_x * x_x);
    t.set(Output::Pc, Input::PcIn, chi_c * ske);
    t.set(Output::Pc, Input::PcInI, chi_c * ski);

    for inp in [Input::QuadXIn, Input::PcIn, Input::PcInI] {
        let v = t.get(Output::Pc, inp) * ske - if inp == Input::PcIn { re(1.0) } else { re(0.0) };
        t.set(Output::PcOut, inp, v);
    }
    Ok(t.rotate_cavity_basis(drive.theta()))
}

/// `P̃_c,x = 2Gχ_c`, the coefficient between the dynamical variables `X` and `P_c`.
pub fn bae_cavity_from_mechanics(
    params: &SystemParams,
    drive: &DriveScheme,
    omega: f64,
    cavity: CavitySusceptibility,
) -> Complex64 {
    let chi_c = match cavity {
        CavitySusceptibility::OnResonance => re(2.0 / params.kappa()),
        CavitySusceptibility::Exact => chi_lorentz(params.kappa(), omega),
    };
    chi_c * (2.0 * drive.coupling())
}

/// Closed-form set for whatever regime `drive` selects.
pub fn transduction_closed_form(omega: f64, params: &SystemParams, drive: &DriveScheme) -> Result<TransductionSet> {
    match drive.regime() {
        Regime::BadCavitySingleTone => transduction_bad_cavity(omega, params, drive),
        Regime::RedSidebandSingleTone => transduction_good_cavity(omega, params, drive),
        Regime::TwoToneBae => transduction_bae(omega, params, drive, CavitySusceptibility::OnResonance),
    }
}

/// Solves the frequency-domain equations of motion of `drive`'s regime at `omega`.
///
/// Single-tone regimes use the state `(X_c, P_c, x, p)`:
///
/// ```text
/// (κ/2 − iω)X_c + ΔP_c        = √κ_e X_c,in + √κ_i X_c,inI
/// (κ/2 − iω)P_c − ΔX_c + 2Gx  = √κ_e P_c,in + √κ_i P_c,inI
/// (γ/2 − iω)x − ω_m p         = √γ x_in
/// (γ/2 − iω)p + ω_m x + 2GX_c = √γ p_in
/// ```
///
/// The BAE regime uses `(X_c, P_c, X, P)` with the cavity driven by `2GX` and
/// `P` driven by `−2GX_c`. The output field is `P_c,out = √κ_e P_c − P_c,in`.
pub fn solve_linear_response(omega: f64, params: &SystemParams, drive: &DriveScheme) -> Result<TransductionSet> {
    let z = Complex64::new(0.0, 0.0);
    let g = drive.coupling();
    let cav = Complex64::new(params.kappa() / 2.0, -omega);
    let mech = Complex64::new(params.gamma / 2.0, -omega);
    let (sg, ske, ski) = (re(libm::sqrt(params.gamma)), re(libm::sqrt(params.kappa_e)), re(libm::sqrt(params.kappa_i)));

    let mut b = [[z; 8]; 4];
    b[0][Input::XcIn.index()] = ske;
    b[0][Input::XcInI.index()] = ski;
    b[1][Input::PcIn.index()] = ske;
    b[1][Input::PcInI.index()] = ski;

    let (mut a, mech_rows) = match drive.regime() {
        Regime::TwoToneBae => {
            b[2][Input::QuadXIn.index()] = sg;
            b[3][Input::QuadPIn.index()] = sg;
            let a = [
                [cav, z, z, z],
                [z, cav, re(-2.0 * g), z],
                [z, z, mech, z],
                [re(2.0 * g), z, z, mech],
            ];
            (a, (Output::QuadX, Output::QuadP))
        }
        _ => {
            let delta = drive.detuning(params).unwrap_or(0.0);
            let wm = params.omega_m;
            b[2][Input::XIn.index()] = sg;
            b[3][Input::PIn.index()] = sg;
            let a = [
                [cav, re(delta), z, z],
                [re(-delta), cav, re(2.0 * g), z],
                [z, z, mech, re(-wm)],
                [re(2.0 * g), z, re(wm), mech],
            ];
            (a, (Output::X, Output::P))
        }
    };
    if !solve_complex(&mut a, &mut b) {
        return Err(Error::Singular { omega });
    }

    let mut t = TransductionSet::zeros(omega);
    for inp in Input::ALL {
        let k = inp.index();
        t.set(Output::Xc, inp, b[0][k]);
        t.set(Output::Pc, inp, b[1][k]);
        t.set(mech_rows.0, inp, b[2][k]);
        t.set(mech_rows.1, inp, b[3][k]);
        let out = b[1][k] * ske - if inp == Input::PcIn { re(1.0) } else { z };
        t.set(Output::PcOut, inp, out);
    }
    Ok(t.rotate_cavity_basis(drive.theta()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use crate::params::SystemParams;

    fn fast_cavity() -> SystemParams {
        // κ/ω_m = 10³
        SystemParams::new(1e9, 1.0, 400.0, 600.0, 1e-4, 1e-6).unwrap()
    }

    fn slow_cavity() -> SystemParams {
        // κ/ω_m = 10⁻³
        SystemParams::new(1e9, 1.0, 4e-4, 6e-4, 1e-7, 1e-9).unwrap()
    }

    #[test]
    fn chi_m_at_zero() {
        let p = SystemParams::membrane_device();
        let s = ComplexSusceptibilities::at(&p, p.gamma, 0.0);
        assert!((s.chi_m - re(2.0 / p.gamma)).norm() / (2.0 / p.gamma) < 1e-15);
        assert_eq!(s.chi_e_prime, s.chi_m_prime);
    }

    #[test]
    fn chi_prime_on_resonance() {
        let p = SystemParams::membrane_device();
        let chi = chi_prime(p.gamma, p.omega_m, p.omega_m);
        let approx = I / (p.gamma * p.omega_m);
        assert!((chi - approx).norm() / approx.norm() < p.gamma / p.omega_m);
    }

    #[test]
    fn chi_prime_modulus_is_product_of_lorentzians() {
        let (g, wm) = (0.3, 5.0);
        for k in 0..200 {
            let w = -12.0 + 0.12 * k as f64;
            let lp = 1.0 / ((w - wm) * (w - wm) + g * g / 4.0);
            let lm = 1.0 / ((w + wm) * (w + wm) + g * g / 4.0);
            let chi2 = chi_prime(g, wm, w).norm_sqr();
            assert!((chi2 - lp * lm).abs() / chi2 < 1e-12);
        }
    }

    #[test]
    fn wrong_regime_is_rejected() {
        let p = SystemParams::membrane_device();
        let bae = DriveScheme::bae(1.0);
        assert!(matches!(transduction_bad_cavity(1.0, &p, &bae), Err(Error::WrongRegime { .. })));
        assert!(matches!(transduction_good_cavity(1.0, &p, &bae), Err(Error::WrongRegime { .. })));
        let red = DriveScheme::red_sideband(1.0);
        assert!(transduction_bae(1.0, &p, &red, CavitySusceptibility::Exact).is_err());
        let detuned = DriveScheme::BadCavitySingleTone { coupling: 1.0, detuning: 5.0 };
        assert!(transduction_bad_cavity(1.0, &p, &detuned).is_err());
    }

    #[test]
    fn bad_cavity_zero_coupling_has_no_backaction() {
        let p = SystemParams::membrane_device();
        let t = transduction_bad_cavity(p.omega_m, &p, &DriveScheme::bad_cavity(0.0)).unwrap();
        for (out, inp, _) in t.nonzero() {
            assert!(matches!(inp, Input::XIn | Input::PIn), "{out:?} <- {inp:?}");
        }
    }

    #[test]
    fn loss_partition_identity() {
        let p = SystemParams::membrane_device();
        assert!((p.alpha().powi(2) + p.beta().powi(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sparsity_patterns_of_closed_forms() {
        let p = SystemParams::membrane_device();
        let expect = |t: &TransductionSet, allowed: &[(Output, Input)]| {
            let got: Vec<_> = t.nonzero().map(|(o, i, _)| (o, i)).collect();
            for pair in &got {
                assert!(allowed.contains(pair), "unexpected {pair:?}");
            }
            assert_eq!(got.len(), allowed.len());
        };
        let w = 0.9 * p.omega_m;
        let t = transduction_bad_cavity(w, &p, &DriveScheme::bad_cavity(10.0)).unwrap();
        use Input::*;
        use Output::*;
        expect(
            &t,
            &[(X, XIn), (X, PIn), (X, XcIn), (X, XcInI), (P, XIn), (P, PIn), (P, XcIn), (P, XcInI)],
        );
        let t = transduction_good_cavity(w, &p, &DriveScheme::red_sideband(10.0)).unwrap();
        expect(
            &t,
            &[
                (X, XIn),
                (X, PIn),
                (X, XcIn),
                (X, XcInI),
                (X, PcIn),
                (X, PcInI),
                (P, XIn),
                (P, PIn),
                (P, XcIn),
                (P, XcInI),
                (P, PcIn),
                (P, PcInI),
            ],
        );
        let t = transduction_bae(0.3, &p, &DriveScheme::bae(10.0), CavitySusceptibility::OnResonance).unwrap();
        assert_eq!(t.get(QuadX, XcIn), Complex64::new(0.0, 0.0));
        assert_eq!(t.get(QuadX, XcInI), Complex64::new(0.0, 0.0));
        assert_eq!(t.get(QuadX, QuadPIn), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn good_cavity_backaction_ratio() {
        let p = SystemParams::membrane_device();
        let t = transduction_good_cavity(p.omega_m, &p, &DriveScheme::red_sideband(100.0)).unwrap();
        let r = t.get(Output::X, Input::XcInI).norm() / t.get(Output::X, Input::XcIn).norm();
        assert!((r - libm::sqrt(156.0 / 145.0)).abs() < 1e-12);
        assert!((r - 1.037).abs() < 1e-3);
    }

    #[test]
    fn good_cavity_zero_coupling_is_bare_oscillator() {
        let p = SystemParams::membrane_device();
        let w = p.omega_m * 1.001;
        let t = transduction_good_cavity(w, &p, &DriveScheme::red_sideband(0.0)).unwrap();
        let chi = chi_prime(p.gamma, p.omega_m, w);
        let e = chi * libm::sqrt(p.gamma) * p.omega_m;
        assert!((t.get(Output::X, Input::PIn) - e).norm() <= 1e-15 * e.norm());
        assert_eq!(t.get(Output::X, Input::XcIn), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bae_backaction_at_dc_matches_spectrum_difference() {
        let p = SystemParams::membrane_device();
        let g = hz_to_rad(30.0);
        let n_i = 0.7;
        let t = transduction_bae(0.0, &p, &DriveScheme::bae(g), CavitySusceptibility::OnResonance).unwrap();
        let ba = t.get(Output::QuadP, Input::XcIn).norm_sqr() * 0.5
            + t.get(Output::QuadP, Input::XcInI).norm_sqr() * (0.5 + n_i);
        let n_c = n_i * p.kappa_i / p.kappa();
        let expected = 64.0 * g * g / (p.gamma * p.gamma * p.kappa()) * (0.5 + n_c);
        assert!((ba - expected).abs() / expected < 1e-12);
        assert_eq!(transduction_bae(0.0, &p, &DriveScheme::bae(0.0), CavitySusceptibility::Exact)
            .unwrap()
            .get(Output::QuadP, Input::XcIn), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn solver_matches_bae_closed_form_exactly() {
        let p = SystemParams::membrane_device();
        let drive = DriveScheme::bae(hz_to_rad(250.0));
        for k in 0..50 {
            let w = -3.0 * p.kappa() + 0.12 * p.kappa() * k as f64;
            let a = solve_linear_response(w, &p, &drive).unwrap();
            let b = transduction_bae(w, &p, &drive, CavitySusceptibility::Exact).unwrap();
            for (o, i, v) in b.nonzero() {
                assert!((a.get(o, i) - v).norm() <= 1e-12 * v.norm(), "{o:?}<-{i:?} at {w}");
            }
        }
    }

    #[test]
    fn bae_on_resonance_cavity_error_is_second_order() {
        let p = SystemParams::membrane_device();
        let drive = DriveScheme::bae(hz_to_rad(250.0));
        for &w in &[1e-3 * p.kappa(), 1e-2 * p.kappa(), 0.05 * p.kappa()] {
            let exact = solve_linear_response(w, &p, &drive).unwrap();
            let approx = transduction_bae(w, &p, &drive, CavitySusceptibility::OnResonance).unwrap();
            let (a, b) = (exact.get(Output::QuadP, Input::XcIn).norm(), approx.get(Output::QuadP, Input::XcIn).norm());
            let bound = (2.0 * w / p.kappa()).powi(2);
            assert!(((a - b) / b).abs() <= bound, "{w}: {} > {bound}", ((a - b) / b).abs());
        }
    }

    #[test]
    fn solver_zero_coupling_gives_bare_susceptibilities() {
        let p = SystemParams::membrane_device();
        for regime in Regime::ALL {
            let drive = DriveScheme::with_cooperativity(regime, &p, 0.0);
            for &w in &[0.0, 0.3 * p.omega_m, p.omega_m, 2.5 * p.omega_m] {
                let t = solve_linear_response(w, &p, &drive).unwrap();
                let delta = drive.detuning(&p).unwrap_or(0.0);
                let cav = Complex64::new(p.kappa() / 2.0, -w);
                let ske = libm::sqrt(p.kappa_e);
                let xc = t.get(Output::Xc, Input::XcIn);
                let e = cav / (cav * cav + delta * delta) * ske;
                assert!((xc - e).norm() <= 1e-14 * e.norm(), "{regime}");
                if regime == Regime::TwoToneBae {
                    let v = t.get(Output::QuadX, Input::QuadXIn);
                    let e = chi_lorentz(p.gamma, w) * libm::sqrt(p.gamma);
                    assert!((v - e).norm() <= 1e-14 * e.norm());
                } else if regime == Regime::BadCavitySingleTone {
                    // elimination cancels down to O(γ) near resonance
                    let tol = 64.0 * f64::EPSILON * p.omega_m / p.gamma;
                    let chi = chi_prime(p.gamma, p.omega_m, w);
                    let sg = libm::sqrt(p.gamma);
                    let v = t.get(Output::X, Input::PIn);
                    assert!((v - chi * sg * p.omega_m).norm() <= tol * v.norm());
                    let v = t.get(Output::X, Input::XIn);
                    let e = chi * Complex64::new(p.gamma / 2.0, -w) * sg;
                    assert!((v - e).norm() <= tol * e.norm());
                }
            }
        }
    }

    #[test]
    fn solver_matches_bad_cavity_closed_form_in_fast_cavity_limit() {
        let p = fast_cavity();
        let drive = DriveScheme::with_cooperativity(Regime::BadCavitySingleTone, &p, 3.0);
        let mut worst: f64 = 0.0;
        for k in 1..=400 {
            let w = 2.0 * p.omega_m * k as f64 / 400.0;
            let a = solve_linear_response(w, &p, &drive).unwrap();
            let b = transduction_bad_cavity(w, &p, &drive).unwrap();
            for (o, i, v) in b.nonzero() {
                let dev = (a.get(o, i).norm() - v.norm()).abs() / v.norm();
                worst = worst.max(dev);
            }
        }
        assert!(worst <= 1e-4, "{worst}");
    }

    #[test]
    fn solver_matches_good_cavity_closed_form_near_resonance() {
        let p = slow_cavity();
        let drive = DriveScheme::with_cooperativity(Regime::RedSidebandSingleTone, &p, 50.0);
        let kappa = p.kappa();
        let mut worst: f64 = 0.0;
        for k in -50..=50 {
            // |ω − ω_m| ≤ κ/20
            let w = p.omega_m + kappa / 20.0 * k as f64 / 50.0;
            let a = solve_linear_response(w, &p, &drive).unwrap();
            let b = transduction_good_cavity(w, &p, &drive).unwrap();
            for (o, i, v) in b.nonzero() {
                let dev = (a.get(o, i).norm() - v.norm()).abs() / v.norm();
                worst = worst.max(dev);
            }
        }
        // cavity filtering (2δω/κ)²/2 ≤ 1/200 plus O(κ/ω_m)
        assert!(worst <= 0.005 + 2.0 * kappa / p.omega_m, "{worst}");
    }

    #[test]
    fn singular_system_is_reported() {
        let mut p = SystemParams::membrane_device();
        p.gamma = 0.0;
        let err = solve_linear_response(0.0, &p, &DriveScheme::bae(1.0)).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn theta_rotates_only_the_cavity_basis() {
        let p = SystemParams::membrane_device();
        let base = DriveScheme::bae(hz_to_rad(100.0));
        let turned = DriveScheme::TwoToneBae { coupling: hz_to_rad(100.0), theta: 0.4, cooling: None };
        let w = 0.2 * p.kappa();
        let a = solve_linear_response(w, &p, &base).unwrap();
        let b = solve_linear_response(w, &p, &turned).unwrap();
        for inp in Input::ALL {
            assert_eq!(a.get(Output::QuadX, inp), b.get(Output::QuadX, inp));
            assert_eq!(a.get(Output::QuadP, inp), b.get(Output::QuadP, inp));
            let na = a.get(Output::Xc, inp).norm_sqr() + a.get(Output::Pc, inp).norm_sqr();
            let nb = b.get(Output::Xc, inp).norm_sqr() + b.get(Output::Pc, inp).norm_sqr();
            assert!((na - nb).abs() <= 1e-12 * na.max(1e-300));
        }
    }
}
