use crate::error::{Error, Result};

/// Why a linear fit's uncertainties are not meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LinearFitWarning {
    /// As many parameters as points: the line interpolates exactly and the
    /// residual scale is undefined, so standard errors are reported as zero.
    NoDegreesOfFreedom,
}

/// Weighted straight-line fit `y = slope·x (+ intercept)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearFit {
    pub slope: f64,
    pub slope_se: f64,
    /// `None` for fits constrained through the origin.
    pub intercept: Option<f64>,
    pub intercept_se: Option<f64>,
    /// Weighted residual sum of squares per degree of freedom.
    pub reduced_chi2: f64,
    pub dof: usize,
    pub warning: Option<LinearFitWarning>,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept.unwrap_or(0.0)
    }
}

fn check_inputs(xs: &[f64], ys: &[f64], weights: Option<&[f64]>, min: usize) -> Result<()> {
    if xs.len() != ys.len() || weights.is_some_and(|w| w.len() != xs.len()) {
        return Err(Error::Domain(alloc::string::String::from("fit inputs differ in length")));
    }
    if xs.len() < min {
        return Err(Error::Domain(alloc::format!("linear fit needs at least {min} points, got {}", xs.len())));
    }
    let finite = |v: &f64| v.is_finite();
    if !xs.iter().all(finite) || !ys.iter().all(finite) {
        return Err(Error::Domain(alloc::string::String::from("fit inputs must be finite")));
    }
    if let Some(w) = weights {
        if !w.iter().all(|&v| v.is_finite() && v > 0.0) {
            return Err(Error::Domain(alloc::string::String::from("fit weights must be positive")));
        }
    }
    Ok(())
}

fn weight(weights: Option<&[f64]>, i: usize) -> f64 {
    weights.map_or(1.0, |w| w[i])
}

/// `y = slope·x` by weighted least squares. Weights are relative; standard
/// errors are scaled by the residual variance.
pub fn fit_linear_through_origin(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    check_inputs(xs, ys, weights, 1)?;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..xs.len() {
        let w = weight(weights, i);
        sxx += w * xs[i] * xs[i];
        sxy += w * xs[i] * ys[i];
    }
    if !(sxx > 0.0) {
        return Err(Error::SingularFit(alloc::string::String::from("all abscissae are zero")));
    }
    let slope = sxy / sxx;
    let chi2: f64 = (0..xs.len())
        .map(|i| {
            let r = ys[i] - slope * xs[i];
            weight(weights, i) * r * r
        })
        .sum();
    let dof = xs.len() - 1;
    let (s2, warning) = if dof == 0 { (0.0, Some(LinearFitWarning::NoDegreesOfFreedom)) } else { (chi2 / dof as f64, None) };
    Ok(LinearFit {
        slope,
        slope_se: libm::sqrt(s2 / sxx),
        intercept: None,
        intercept_se: None,
        reduced_chi2: s2,
        dof,
        warning,
    })
}

/// `y = slope·x + intercept` by weighted least squares.
pub fn fit_linear(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    check_inputs(xs, ys, weights, 2)?;
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..xs.len() {
        let w = weight(weights, i);
        sw += w;
        sx += w * xs[i];
        sy += w * ys[i];
    }
    let (xm, ym) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..xs.len() {
        let w = weight(weights, i);
        let dx = xs[i] - xm;
        sxx += w * dx * dx;
        sxy += w * dx * (ys[i] - ym);
    }
    if !(sxx > 1e-300 && sxx > 1e-24 * xs.iter().map(|x| x * x).fold(0.0, f64::max) * sw) {
        return Err(Error::SingularFit(alloc::string::String::from("abscissae are all equal")));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let chi2: f64 = (0..xs.len())
        .map(|i| {
            let r = ys[i] - slope * xs[i] - intercept;
            weight(weights, i) * r * r
        })
        .sum();
    let dof = xs.len() - 2;
    let (s2, warning) = if dof == 0 { (0.0, Some(LinearFitWarning::NoDegreesOfFreedom)) } else { (chi2 / dof as f64, None) };
    Ok(LinearFit {
        slope,
        slope_se: libm::sqrt(s2 / sxx),
        intercept: Some(intercept),
        intercept_se: Some(libm::sqrt(s2 * (1.0 / sw + xm * xm / sxx))),
        reduced_chi2: s2,
        dof,
        warning,
    })
}
