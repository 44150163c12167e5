use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{invert_real, solve_real};
use crate::spectra::SpectrumTrace;

/// Parameters of `floor + (area/π)·(w/2)/((f − center)² + (w/2)²)`, where
/// `w` is the full width at half maximum. `area` is the integrated peak.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorentzianParams {
    pub floor: f64,
    pub area: f64,
    pub center: f64,
    pub width: f64,
}

impl LorentzianParams {
    fn to_array(self) -> [f64; 4] {
        [self.floor, self.area, self.center, self.width]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self { floor: a[0], area: a[1], center: a[2], width: a[3] }
    }
}

pub fn lorentzian_model(f: f64, p: &LorentzianParams) -> f64 {
    let hw = 0.5 * p.width;
    let d = f - p.center;
    p.floor + p.area / PI * hw / (d * d + hw * hw)
}

/// Partial derivatives of [`lorentzian_model`] with respect to
/// `(floor, area, center, width)`.
pub fn lorentzian_gradient(f: f64, p: &LorentzianParams) -> [f64; 4] {
    let hw = 0.5 * p.width;
    let d = f - p.center;
    let den = d * d + hw * hw;
    let a = p.area / PI;
    [1.0, hw / den / PI, a * hw * 2.0 * d / (den * den), a * (d * d - hw * hw) / (2.0 * den * den)]
}

/// Result of [`fit_lorentzian`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorentzianFit {
    /// Trace units × Hz.
    pub area: f64,
    /// Full width at half maximum, Hz.
    pub linewidth_hz: f64,
    pub center_hz: f64,
    pub floor: f64,
    pub area_se: f64,
    pub linewidth_se: f64,
    pub center_se: f64,
    pub floor_se: f64,
    /// Weighted residual sum of squares per degree of freedom, with weights
    /// `1/model²`; about `1/N` for `N`-fold averaged spectra.
    pub reduced_chi2: f64,
    pub iterations: usize,
    /// Whether the re-weighting passes reached a fixed point.
    pub converged: bool,
    pub low_confidence: bool,
}

impl LorentzianFit {
    pub fn params(&self) -> LorentzianParams {
        LorentzianParams { floor: self.floor, area: self.area, center: self.center_hz, width: self.linewidth_hz }
    }
}

/// Tuning of [`fit_lorentzian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Re-weighting passes with weights `1/model²`.
    pub reweight_passes: usize,
    /// Below this `area/se(area)` the fit is flagged.
    pub min_significance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 400, reweight_passes: 12, min_significance: 5.0 }
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    w: Vec<f64>,
    width_bounds: (f64, f64),
    center_bounds: (f64, f64),
}

impl Problem<'_> {
    fn chi2(&self, p: &LorentzianParams) -> f64 {
        self.x
            .iter()
            .zip(self.y)
            .zip(&self.w)
            .map(|((&x, &y), &w)| {
                let r = y - lorentzian_model(x, p);
                w * r * r
            })
            .sum()
    }

    fn normal_equations(&self, p: &LorentzianParams) -> ([[f64; 4]; 4], [f64; 4]) {
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for ((&x, &y), &w) in self.x.iter().zip(self.y).zip(&self.w) {
            let g = lorentzian_gradient(x, p);
            let r = y - lorentzian_model(x, p);
            for i in 0..4 {
                jtr[i] += w * g[i] * r;
                for j in i..4 {
                    jtj[i][j] += w * g[i] * g[j];
                }
            }
        }
        for i in 0..4 {
            for j in 0..i {
                jtj[i][j] = jtj[j][i];
            }
        }
        (jtj, jtr)
    }

    fn project(&self, mut a: [f64; 4]) -> [f64; 4] {
        a[1] = a[1].max(0.0);
        a[2] = a[2].clamp(self.center_bounds.0, self.center_bounds.1);
        a[3] = a[3].clamp(self.width_bounds.0, self.width_bounds.1);
        a
    }

    /// Plain Gauss-Newton steps for as long as they keep shrinking. Near the
    /// optimum χ² changes drown in rounding, so the damped search above can
    /// only place the minimum to about √ε; the gradient still resolves it.
    fn polish(&self, mut p: LorentzianParams, mut chi: f64, mut it: usize) -> (LorentzianParams, f64, usize) {
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let (jtj, jtr) = self.normal_equations(&p);
            let Some(step) = solve_real(jtj, jtr) else { break };
            let base = p.to_array();
            let mut next = [0.0; 4];
            for i in 0..4 {
                next[i] = base[i] + step[i];
            }
            let size = step_size(&base, &next);
            if !(size < 0.5 * last) || self.project(next) != next {
                break;
            }
            p = LorentzianParams::from_array(next);
            last = size;
            it += 1;
            if size <= f64::EPSILON {
                break;
            }
        }
        chi = if last.is_finite() { self.chi2(&p) } else { chi };
        (p, chi, it)
    }

    /// Levenberg-Marquardt from `start`. Returns the optimum, its χ² and the
    /// iteration count, or `None` if it ran out of iterations.
    fn minimize(&self, start: LorentzianParams, max_iter: usize) -> Option<(LorentzianParams, f64, usize)> {
        let mut p = start;
        let mut chi = self.chi2(&p);
        let mut lambda = 1e-3;
        for it in 0..max_iter {
            let (jtj, jtr) = self.normal_equations(&p);
            let mut improved = false;
            while lambda < 1e16 {
                let mut a = jtj;
                for i in 0..4 {
                    a[i][i] += lambda * jtj[i][i].max(1e-30);
                }
                let Some(step) = solve_real(a, jtr) else {
                    lambda *= 4.0;
                    continue;
                };
                let base = p.to_array();
                let mut trial = [0.0; 4];
                for i in 0..4 {
                    trial[i] = base[i] + step[i];
                }
                let cand = LorentzianParams::from_array(self.project(trial));
                let c = self.chi2(&cand);
                if c <= chi {
                    let rel_step = step_size(&base, &cand.to_array());
                    let small = chi - c <= 1e-15 * chi;
                    p = cand;
                    chi = c;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    if rel_step <= 1e-13 || (small && rel_step <= 1e-11) {
                        return Some(self.polish(p, chi, it + 1));
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                // no descent direction left: stationary point
                return Some(self.polish(p, chi, it + 1));
            }
        }
        None
    }
}

/// Largest parameter change, each measured on its own scale: the floor
/// against the normalised maximum, the centre against the width.
fn step_size(from: &[f64; 4], to: &[f64; 4]) -> f64 {
    let scale = [1.0, from[1].abs(), from[3].abs(), from[3].abs()];
    (0..4).map(|i| (to[i] - from[i]).abs() / (scale[i].max(from[i].abs()) + 1e-300)).fold(0.0, f64::max)
}

fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn smooth(y: &[f64], half: usize) -> Vec<f64> {
    let n = y.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in y {
        prefix.push(prefix[prefix.len() - 1] + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Fits a single Lorentzian on a flat floor to `trace`.
///
/// Values are normalised by their maximum and frequencies by the half span
/// before fitting, so the result scales with the trace's gain to rounding
/// (exactly when the gain is a power of two). Weights `1/model²` match the relative noise of
/// averaged periodograms and are refined over a few passes.
pub fn fit_lorentzian(trace: &SpectrumTrace) -> Result<LorentzianFit> {
    fit_lorentzian_with(trace, &FitOptions::default())
}

pub fn fit_lorentzian_with(trace: &SpectrumTrace, opts: &FitOptions) -> Result<LorentzianFit> {
    trace.validate()?;
    let n = trace.len();
    if n < 8 {
        return Err(Error::InvalidTrace(alloc::format!("need at least 8 points to fit, got {n}")));
    }
    let f = &trace.freq_hz;
    let ymax = trace.total.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(ymax > 0.0) || trace.total.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidTrace(alloc::string::String::from("trace must be non-negative with a positive maximum")));
    }
    let mid = 0.5 * (f[0] + f[n - 1]);
    let scale = 0.5 * (f[n - 1] - f[0]);
    let x: Vec<f64> = f.iter().map(|v| (v - mid) / scale).collect();
    let y: Vec<f64> = trace.total.iter().map(|v| v / ymax).collect();
    let dx_min = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let dx_mean = 2.0 / (n - 1) as f64;

    let floor0 = median(&y);
    let sm = smooth(&y, (n / 200).max(1));
    let (imax, &peak) = sm.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let height = (peak - floor0).max(0.0);
    let half_level = floor0 + 0.5 * height;
    let left = (0..imax).rev().find(|&i| sm[i] < half_level).unwrap_or(0);
    let right = (imax..n).find(|&i| sm[i] < half_level).unwrap_or(n - 1);
    let width0 = (x[right] - x[left]).max(2.0 * dx_mean);
    let center0 = x[imax];

    let mut prob = Problem {
        x: &x,
        y: &y,
        w: y.iter().map(|_| 1.0).collect(),
        width_bounds: (0.1 * dx_min, 4.0),
        center_bounds: (-1.0, 1.0),
    };
    // first-pass weights from the smoothed data
    for (w, s) in prob.w.iter_mut().zip(&sm) {
        *w = 1.0 / (s * s).max(1e-300);
    }

    let mut best: Option<(LorentzianParams, f64, usize)> = None;
    for factor in [0.5, 1.0, 2.0] {
        let width = (width0 * factor).clamp(prob.width_bounds.0, prob.width_bounds.1);
        let start = LorentzianParams { floor: floor0, area: height * PI * width / 2.0, center: center0, width };
        if let Some(r) = prob.minimize(start, opts.max_iterations) {
            if best.as_ref().map_or(true, |b| r.1 < b.1) {
                best = Some(r);
            }
        }
    }
    let (mut p, mut chi, mut iterations) = match best {
        Some(b) => b,
        None => {
            return Err(Error::FitNotConverged { iterations: opts.max_iterations, residual: prob.chi2(&LorentzianParams {
                floor: floor0,
                area: height * PI * width0 / 2.0,
                center: center0,
                width: width0,
            }) })
        }
    };
    let mut settled = opts.reweight_passes == 0;
    for _ in 0..opts.reweight_passes {
        for (w, &xi) in prob.w.iter_mut().zip(&x) {
            let m = lorentzian_model(xi, &p);
            *w = 1.0 / (m * m).max(1e-300);
        }
        let (q, c, it) = prob
            .minimize(p, opts.max_iterations)
            .ok_or(Error::FitNotConverged { iterations: opts.max_iterations, residual: chi })?;
        settled = (q.area - p.area).abs() <= 1e-13 * q.area.abs() && (q.width - p.width).abs() <= 1e-13 * q.width;
        p = q;
        chi = c;
        iterations += it;
        if settled {
            break;
        }
    }

    let dof = (n - 4) as f64;
    let s2 = chi / dof;
    let (jtj, _) = prob.normal_equations(&p);
    let se = match invert_real(&jtj) {
        Some(cov) => [0, 1, 2, 3].map(|i| libm::sqrt((cov[i][i] * s2).max(0.0))),
        None => [f64::INFINITY; 4],
    };

    let area = p.area * scale * ymax;
    let area_se = se[1] * scale * ymax;
    let linewidth = p.width * scale;
    let significance = if area_se > 0.0 { area / area_se } else if area > 0.0 { f64::INFINITY } else { 0.0 };
    let df = dx_mean * scale;
    Ok(LorentzianFit {
        area,
        linewidth_hz: linewidth,
        center_hz: mid + p.center * scale,
        floor: p.floor * ymax,
        area_se,
        linewidth_se: se[3] * scale,
        center_se: se[2] * scale,
        floor_se: se[0] * ymax,
        reduced_chi2: s2,
        iterations,
        converged: settled,
        low_confidence: !(significance >= opts.min_significance) || linewidth < 2.0 * df,
    })
}
