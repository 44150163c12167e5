//! Built-in consistency checks: numerical spectra against closed forms, the
//! response solver against closed-form transduction, device anchors and the
//! peak fitter. A [`Mutation`] perturbs one closed-form value so that the
//! corresponding check must fail, which verifies the check can fail at all.

use alloc::string::String;
use alloc::vec::Vec;

use crate::constants::hz_to_rad;
use crate::error::Result;
use crate::fit::{fit_lorentzian, lorentzian_model, LorentzianParams};
use crate::grid::uniform_grid;
use crate::params::{bose_occupation, BathState, DriveScheme, Regime, SystemParams};
use crate::response::{
    solve_linear_response, transduction_bad_cavity, transduction_bae, CavitySusceptibility, Input, Output,
};
use crate::spectra::{
    backaction_occupancy, bae_quadrature_backaction, default_grid, integrate_spectrum, spectrum_quadratures_bae,
    spectrum_x_bad_cavity, spectrum_x_good_cavity, variance_bad_cavity, variance_bae, variance_good_cavity,
    BaeMechanics, Frame, SpectrumTrace, TailModel,
};

/// A deliberate error injected into one closed-form reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mutation {
    /// Backaction term of the unresolved-sideband variance scaled by 1.01.
    BadCavityBackaction,
    /// Vacuum term of the sideband-cooling variance scaled by 1.1.
    GoodCavityVacuum,
    /// Conjugate-quadrature BAE backaction `2C` scaled by 1.01.
    BaeConjugateBackaction,
    /// Closed-form BAE backaction transduction scaled by `1 + 10⁻⁶`.
    BaeTransduction,
    /// Unresolved-sideband transduction scaled by 1.01.
    BadCavityTransduction,
    /// Thermal occupation shifted by two quanta.
    BoseOccupation,
    /// Backaction occupancy of sideband cooling doubled.
    BackactionLedger,
}

impl Mutation {
    pub const ALL: [Mutation; 7] = [
        Mutation::BadCavityBackaction,
        Mutation::GoodCavityVacuum,
        Mutation::BaeConjugateBackaction,
        Mutation::BaeTransduction,
        Mutation::BadCavityTransduction,
        Mutation::BoseOccupation,
        Mutation::BackactionLedger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::BadCavityBackaction => "bad-cavity-backaction",
            Mutation::GoodCavityVacuum => "good-cavity-vacuum",
            Mutation::BaeConjugateBackaction => "bae-conjugate-backaction",
            Mutation::BaeTransduction => "bae-transduction",
            Mutation::BadCavityTransduction => "bad-cavity-transduction",
            Mutation::BoseOccupation => "bose-occupation",
            Mutation::BackactionLedger => "backaction-ledger",
        }
    }

    /// The check this mutation must break.
    pub fn target(self) -> &'static str {
        match self {
            Mutation::BadCavityBackaction => "bad_cavity_variance",
            Mutation::GoodCavityVacuum => "good_cavity_variance",
            Mutation::BaeConjugateBackaction => "bae_variance_p",
            Mutation::BaeTransduction => "bae_solver_exact",
            Mutation::BadCavityTransduction => "bad_cavity_solver",
            Mutation::BoseOccupation => "bose_anchor",
            Mutation::BackactionLedger => "backaction_ledger",
        }
    }
}

impl core::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| alloc::format!("unknown mutation '{s}'"))
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: &'static str,
    /// Measured deviation (relative unless the description says otherwise).
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub description: &'static str,
}

impl Check {
    fn new(name: &'static str, description: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self { name, deviation, tolerance, passed: deviation <= tolerance, description }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    libm::fabs(a - b) / libm::fabs(b)
}

fn area(t: &SpectrumTrace) -> Result<f64> {
    Ok(integrate_spectrum(t, None, TailModel::LorentzianAnalytic)?.value)
}

fn scale(active: bool, factor: f64) -> f64 {
    if active {
        factor
    } else {
        1.0
    }
}

/// Runs every check, with `mutation` applied to its target if given.
pub fn run_selftest(mutation: Option<Mutation>) -> Result<Vec<Check>> {
    let m = |x: Mutation| mutation == Some(x);
    let p = SystemParams::membrane_device();
    let mut out = Vec::new();

    // unresolved sidebands need κ ≫ ω_m
    let fast = SystemParams::new(1e9, 1.0, 400.0, 600.0, 1e-4, 1e-6)?;
    {
        let (c, n_m, n_c) = (3.0, 50.0, 0.2);
        let drive = DriveScheme::with_cooperativity(Regime::BadCavitySingleTone, &p, c);
        let grid = default_grid(Regime::BadCavitySingleTone, &p, p.gamma)?;
        let t = spectrum_x_bad_cavity(&grid, &p, &drive, &BathState::with_cavity_occupation(&p, n_m, n_c)?)?;
        let mut v = variance_bad_cavity(c, n_m, n_c)?;
        v.first.qba *= scale(m(Mutation::BadCavityBackaction), 1.01);
        out.push(Check::new(
            "bad_cavity_variance",
            "integrated unresolved-sideband spectrum vs closed-form variance",
            rel(area(&t)?, v.total_first()),
            1e-5,
        ));
    }
    {
        let (c, n_m, n_c) = (40.0, 1089.0, 0.2);
        let drive = DriveScheme::with_cooperativity(Regime::RedSidebandSingleTone, &p, c);
        let grid = default_grid(Regime::RedSidebandSingleTone, &p, p.gamma * (1.0 + c))?;
        let t = spectrum_x_good_cavity(&grid, &p, &drive, &BathState::with_cavity_occupation(&p, n_m, n_c)?)?;
        let mut v = variance_good_cavity(c, n_m, n_c)?;
        v.first.vacuum *= scale(m(Mutation::GoodCavityVacuum), 1.1);
        out.push(Check::new(
            "good_cavity_variance",
            "integrated sideband-cooling spectrum vs closed-form variance",
            rel(area(&t)?, v.total_first()),
            1e-5,
        ));
    }
    {
        let (c, n_m, n_c) = (5.0, 100.0, 0.3);
        let drive = DriveScheme::with_cooperativity(Regime::TwoToneBae, &p, c);
        let baths = BathState::with_cavity_occupation(&p, n_m, n_c)?;
        let grid = default_grid(Regime::TwoToneBae, &p, p.gamma)?;
        let mech = BaeMechanics::resolve(&p, &drive, &baths)?;
        let (sx, sp) = spectrum_quadratures_bae(&grid, &p, &drive, &baths, mech)?;
        let mut v = variance_bae(c, n_m, n_c)?;
        out.push(Check::new(
            "bae_variance_x",
            "integrated measured-quadrature spectrum vs closed form",
            rel(area(&sx)?, v.total_first()),
            1e-5,
        ));
        v.second.qba *= scale(m(Mutation::BaeConjugateBackaction), 1.01);
        out.push(Check::new(
            "bae_variance_p",
            "integrated conjugate-quadrature spectrum vs closed form",
            rel(area(&sp)?, v.total_second()),
            1e-5,
        ));
    }
    {
        let drive = DriveScheme::bae(hz_to_rad(250.0));
        let f = scale(m(Mutation::BaeTransduction), 1.0 + 1e-6);
        let mut worst: f64 = 0.0;
        for k in 0..41 {
            let w = -2.0 * p.kappa() + 0.1 * p.kappa() * k as f64;
            let a = solve_linear_response(w, &p, &drive)?;
            let b = transduction_bae(w, &p, &drive, CavitySusceptibility::Exact)?;
            for (o, i, v) in b.nonzero() {
                let v = if (o, i) == (Output::QuadP, Input::XcIn) { v * f } else { v };
                worst = worst.max((a.get(o, i) - v).norm() / v.norm());
            }
        }
        out.push(Check::new(
            "bae_solver_exact",
            "linear-response solver vs BAE transduction with the full cavity response",
            worst,
            1e-9,
        ));
    }
    {
        let drive = DriveScheme::with_cooperativity(Regime::BadCavitySingleTone, &fast, 3.0);
        let f = scale(m(Mutation::BadCavityTransduction), 1.01);
        let mut worst: f64 = 0.0;
        for k in 1..=200 {
            let w = 2.0 * fast.omega_m * k as f64 / 200.0;
            let a = solve_linear_response(w, &fast, &drive)?;
            let b = transduction_bad_cavity(w, &fast, &drive)?;
            for (o, i, v) in b.nonzero() {
                worst = worst.max(libm::fabs(a.get(o, i).norm() - f * v.norm()) / (f * v.norm()));
            }
        }
        out.push(Check::new(
            "bad_cavity_solver",
            "solver vs unresolved-sideband transduction magnitudes at κ/ω_m = 10³",
            worst,
            1e-4,
        ));
    }
    {
        let n = bose_occupation(0.037, p.omega_m)? + if m(Mutation::BoseOccupation) { 2.0 } else { 0.0 };
        out.push(Check::new("bose_anchor", "thermal occupation at 37 mK minus 1089 (absolute)", libm::fabs(n - 1089.0), 1.0));
    }
    {
        let v = variance_good_cavity(1.02e4, 1089.0, 0.2)?;
        let n = v.cooled_occupation.unwrap_or(f64::NAN);
        out.push(Check::new("cooling_anchor", "cooled occupation minus 0.31 (absolute)", libm::fabs(n - 0.31), 0.02));
    }
    {
        let c = 7.0;
        let good = backaction_occupancy(Regime::RedSidebandSingleTone, c)? * scale(m(Mutation::BackactionLedger), 2.0);
        let exact = backaction_occupancy(Regime::BadCavitySingleTone, c)? == c
            && good == c / 2.0
            && backaction_occupancy(Regime::TwoToneBae, c)? == c
            && bae_quadrature_backaction(c) == (0.0, 2.0 * c);
        out.push(Check::new(
            "backaction_ledger",
            "backaction occupancies C, C/2, C and conjugate BAE backaction 2C (0 = exact)",
            if exact { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    {
        let truth = LorentzianParams { floor: 3.0, area: 100.0, center: 0.4, width: 2.9 };
        let f = uniform_grid(-46.4, 46.4, 801)?;
        let y = f.iter().map(|&v| lorentzian_model(v, &truth)).collect();
        let fit = fit_lorentzian(&SpectrumTrace::new(f, y, Frame::Rotating)?)?;
        let dev = rel(fit.area, truth.area)
            .max(rel(fit.linewidth_hz, truth.width))
            .max(rel(fit.center_hz, truth.center))
            .max(rel(fit.floor, truth.floor));
        out.push(Check::new("lorentzian_fit", "peak fit on its own noiseless model", dev, 1e-6));
    }
    Ok(out)
}
