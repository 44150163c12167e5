use crate::error::{Error, Result};
use crate::params::Regime;

/// Contributions to one quadrature's variance, in quanta.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceParts {
    pub vacuum: f64,
    pub thermal: f64,
    /// Quantum backaction.
    pub qba: f64,
    /// Backaction from thermal cavity noise.
    pub classical: f64,
}

impl VarianceParts {
    pub fn total(&self) -> f64 {
        self.vacuum + self.thermal + self.qba + self.classical
    }
}

/// Closed-form variances of the two mechanical quadratures. In single-tone
/// regimes these are `x` and `p`; in the BAE regime `X` and `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceReport {
    pub regime: Regime,
    pub first: VarianceParts,
    pub second: VarianceParts,
    /// Quantum backaction occupancy.
    pub n_qba: f64,
    /// Sideband cooling only: quantum backaction left in the cooled mode, `C/(2(1+C))`.
    pub qba_eff: Option<f64>,
    /// Sideband cooling only: `n_m ≈ (γ/γ_eff)n_m^T + n_c^T`.
    pub cooled_occupation: Option<f64>,
}

impl VarianceReport {
    pub fn total_first(&self) -> f64 {
        self.first.total()
    }

    pub fn total_second(&self) -> f64 {
        self.second.total()
    }
}

#[allow(non_snake_case)]
fn check(c: f64, n_m_T: f64, n_c_T: f64) -> Result<()> {
    for (name, v) in [("C", c), ("n_m_T", n_m_T), ("n_c_T", n_c_T)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(alloc::format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    Ok(())
}

/// Unresolved sidebands: `⟨x²⟩ = ⟨p²⟩ = 1/2 + n_m^T + C(1 + 2n_c^T)`.
#[allow(non_snake_case)]
pub fn variance_bad_cavity(c: f64, n_m_T: f64, n_c_T: f64) -> Result<VarianceReport> {
    check(c, n_m_T, n_c_T)?;
    let parts = VarianceParts { vacuum: 0.5, thermal: n_m_T, qba: c, classical: 2.0 * c * n_c_T };
    Ok(VarianceReport {
        regime: Regime::BadCavitySingleTone,
        first: parts,
        second: parts,
        n_qba: c,
        qba_eff: None,
        cooled_occupation: None,
    })
}

/// Red-sideband cooling: `⟨x²⟩ = [1/2 + n_m^T + C(1/2 + n_c^T)]/(1 + C)`.
#[allow(non_snake_case)]
pub fn variance_good_cavity(c: f64, n_m_T: f64, n_c_T: f64) -> Result<VarianceReport> {
    check(c, n_m_T, n_c_T)?;
    let k = 1.0 / (1.0 + c);
    let parts = VarianceParts { vacuum: 0.5 * k, thermal: n_m_T * k, qba: 0.5 * c * k, classical: c * n_c_T * k };
    Ok(VarianceReport {
        regime: Regime::RedSidebandSingleTone,
        first: parts,
        second: parts,
        n_qba: 0.5 * c,
        qba_eff: Some(0.5 * c * k),
        cooled_occupation: Some(n_m_T * k + n_c_T),
    })
}

/// Two-tone BAE: `⟨X²⟩ = 1/2 + n_m^T`, `⟨P²⟩ = 1/2 + n_m^T + 2C + 4Cn_c^T`.
#[allow(non_snake_case)]
pub fn variance_bae(c: f64, n_m_T: f64, n_c_T: f64) -> Result<VarianceReport> {
    check(c, n_m_T, n_c_T)?;
    let (q_x, q_p) = bae_quadrature_backaction(c);
    Ok(VarianceReport {
        regime: Regime::TwoToneBae,
        first: VarianceParts { vacuum: 0.5, thermal: n_m_T, qba: q_x, classical: 0.0 },
        second: VarianceParts { vacuum: 0.5, thermal: n_m_T, qba: q_p, classical: 4.0 * c * n_c_T },
        n_qba: c,
        qba_eff: None,
        cooled_occupation: None,
    })
}

/// Variance report for any regime.
#[allow(non_snake_case)]
pub fn variance(regime: Regime, c: f64, n_m_T: f64, n_c_T: f64) -> Result<VarianceReport> {
    match regime {
        Regime::BadCavitySingleTone => variance_bad_cavity(c, n_m_T, n_c_T),
        Regime::RedSidebandSingleTone => variance_good_cavity(c, n_m_T, n_c_T),
        Regime::TwoToneBae => variance_bae(c, n_m_T, n_c_T),
    }
}

/// Quantum backaction occupancy: `C`, `C/2` and `C` for the three regimes.
pub fn backaction_occupancy(regime: Regime, c: f64) -> Result<f64> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::Domain(alloc::format!("C must be finite and >= 0, got {c}")));
    }
    Ok(match regime {
        Regime::BadCavitySingleTone | Regime::TwoToneBae => c,
        Regime::RedSidebandSingleTone => 0.5 * c,
    })
}

/// BAE quantum backaction per quadrature, `(X, P) = (0, 2C)`.
pub fn bae_quadrature_backaction(c: f64) -> (f64, f64) {
    (0.0, 2.0 * c)
}

/// Detected photon flux of the BAE output, `(4Cγκ_e/κ)·⟨X²⟩` (photons/s).
pub fn output_flux_bae(c: f64, gamma: f64, kappa_e: f64, kappa: f64, x2: f64) -> Result<f64> {
    for (name, v) in [("gamma", gamma), ("kappa_e", kappa_e), ("kappa", kappa)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(alloc::format!("{name} must be positive, got {v}")));
        }
    }
    if !(c.is_finite() && c >= 0.0 && x2.is_finite() && x2 >= 0.0) {
        return Err(Error::Domain(alloc::format!("invalid C = {c} or <X^2> = {x2}")));
    }
    Ok(4.0 * c * gamma * kappa_e / kappa * x2)
}
