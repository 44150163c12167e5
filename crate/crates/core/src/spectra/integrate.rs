use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::trace::{Component, SpectrumTrace};
use crate::error::{Error, Result};
use crate::grid::Peak;

/// Treatment of the spectrum beyond the ends of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TailModel {
    None,
    /// Each trace peak continues as a Lorentzian; amplitudes are taken from
    /// the peak values and rescaled to match the trace at the grid edge.
    #[default]
    LorentzianAnalytic,
}

/// `∫S df` over a band, in quanta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Part of `value` contributed by the tail model.
    pub tail: f64,
    /// Estimated truncation error of `value`.
    pub error: f64,
}

/// Integrates a trace's total over `band` (Hz, defaults to the whole grid).
/// Tail corrections are added only on sides where the band reaches the end
/// of the grid.
pub fn integrate_spectrum(trace: &SpectrumTrace, band: Option<(f64, f64)>, tail: TailModel) -> Result<IntegralEstimate> {
    integrate_samples(&trace.freq_hz, &trace.total, band, tail, &trace.meta.peaks)
}

/// Integrates one labelled component of a trace.
pub fn integrate_component(
    trace: &SpectrumTrace,
    component: Component,
    band: Option<(f64, f64)>,
    tail: TailModel,
) -> Result<IntegralEstimate> {
    let values = trace
        .component(component)
        .ok_or_else(|| Error::InvalidTrace(alloc::format!("trace has no {} component", component.name())))?;
    integrate_samples(&trace.freq_hz, values, band, tail, &trace.meta.peaks)
}

/// Integrates samples `values` on the grid `freq` (strictly increasing).
pub fn integrate_samples(
    freq: &[f64],
    values: &[f64],
    band: Option<(f64, f64)>,
    tail: TailModel,
    peaks: &[Peak],
) -> Result<IntegralEstimate> {
    if freq.len() < 2 || freq.len() != values.len() {
        return Err(Error::InvalidTrace(alloc::format!(
            "{} frequencies and {} values",
            freq.len(),
            values.len()
        )));
    }
    let (grid_lo, grid_hi) = (freq[0], freq[freq.len() - 1]);
    let (lo, hi) = band.unwrap_or((grid_lo, grid_hi));
    if !(lo >= grid_lo && hi <= grid_hi && hi > lo) {
        return Err(Error::BandOutsideGrid { lo, hi, grid_lo, grid_hi });
    }

    let (f, s) = restrict(freq, values, lo, hi);
    let fine = simpson(&f, &s);
    let coarse = if f.len() >= 5 {
        let fc: Vec<f64> = f.iter().step_by(2).copied().chain(odd_tail(&f)).collect();
        let sc: Vec<f64> = s.iter().step_by(2).copied().chain(odd_tail(&s)).collect();
        simpson(&fc, &sc)
    } else {
        trapezoid(&f, &s)
    };
    let mut error = (fine - coarse).abs() / 15.0;

    let mut tail_sum = 0.0;
    if tail == TailModel::LorentzianAnalytic && !peaks.is_empty() {
        let left = lo == grid_lo;
        let right = hi == grid_hi;
        for (on, edge, sign) in [(left, 0usize, -1.0), (right, f.len() - 1, 1.0)] {
            if on {
                let (t, spread) = lorentzian_tail(&f, &s, edge, sign, peaks);
                tail_sum += t;
                error += spread;
            }
        }
    }
    Ok(IntegralEstimate { value: fine + tail_sum, tail: tail_sum, error })
}

fn odd_tail(v: &[f64]) -> Option<f64> {
    // keep the last point when step_by(2) skipped it
    (v.len() % 2 == 0).then(|| v[v.len() - 1])
}

fn restrict(freq: &[f64], values: &[f64], lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let interp = |x: f64| -> f64 {
        let k = freq.partition_point(|&f| f <= x).clamp(1, freq.len() - 1);
        let (f0, f1) = (freq[k - 1], freq[k]);
        if x == f0 {
            return values[k - 1];
        }
        if x == f1 {
            return values[k];
        }
        let w = (x - f0) / (f1 - f0);
        values[k - 1] * (1.0 - w) + values[k] * w
    };
    let mut f = Vec::with_capacity(freq.len());
    let mut s = Vec::with_capacity(freq.len());
    f.push(lo);
    s.push(interp(lo));
    for (&x, &v) in freq.iter().zip(values) {
        if x > lo && x < hi {
            f.push(x);
            s.push(v);
        }
    }
    f.push(hi);
    s.push(interp(hi));
    (f, s)
}

fn trapezoid(f: &[f64], s: &[f64]) -> f64 {
    f.windows(2).zip(s.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Composite Simpson rule on an arbitrary increasing grid; a trailing odd
/// interval is closed with the trapezoid rule.
fn simpson(f: &[f64], s: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < f.len() {
        let h0 = f[i + 1] - f[i];
        let h1 = f[i + 2] - f[i + 1];
        let sum = h0 + h1;
        total += sum / 6.0
            * ((2.0 - h1 / h0) * s[i] + sum * sum / (h0 * h1) * s[i + 1] + (2.0 - h0 / h1) * s[i + 2]);
        i += 2;
    }
    if i + 1 < f.len() {
        total += 0.5 * (f[i + 1] - f[i]) * (s[i] + s[i + 1]);
    }
    total
}

fn value_at(f: &[f64], s: &[f64], x: f64) -> Option<f64> {
    if x < f[0] || x > f[f.len() - 1] {
        return None;
    }
    let k = f.partition_point(|&v| v < x).min(f.len() - 1);
    let k = if k > 0 && (x - f[k - 1]).abs() < (f[k] - x).abs() { k - 1 } else { k };
    Some(s[k])
}

/// Mass beyond the edge at index `edge`, on the side given by `sign`, and a
/// spread estimate (difference between rescaled and unscaled amplitudes).
fn lorentzian_tail(f: &[f64], s: &[f64], edge: usize, sign: f64, peaks: &[Peak]) -> (f64, f64) {
    let (fe, se) = (f[edge], s[edge]);
    if se == 0.0 {
        return (0.0, 0.0);
    }
    let mut amps: Vec<f64> =
        peaks.iter().map(|p| value_at(f, s, p.center_hz).map_or(0.0, |v| v * p.hwhm_hz * p.hwhm_hz)).collect();
    let model_at = |amps: &[f64]| -> f64 {
        peaks
            .iter()
            .zip(amps)
            .map(|(p, a)| {
                let d = fe - p.center_hz;
                a / (d * d + p.hwhm_hz * p.hwhm_hz)
            })
            .sum()
    };
    let mut model = model_at(&amps);
    if !(model > 0.0) {
        // nothing to scale from: attribute the edge value to the nearest peak
        let near = (0..peaks.len())
            .min_by(|&a, &b| (peaks[a].center_hz - fe).abs().total_cmp(&(peaks[b].center_hz - fe).abs()))
            .unwrap_or(0);
        amps.iter_mut().for_each(|a| *a = 0.0);
        let p = peaks[near];
        let d = fe - p.center_hz;
        amps[near] = se * (d * d + p.hwhm_hz * p.hwhm_hz);
        model = se;
    }
    let scale = se / model;
    let mass: f64 = peaks
        .iter()
        .zip(&amps)
        .map(|(p, a)| {
            let d = sign * (fe - p.center_hz);
            a / p.hwhm_hz * (FRAC_PI_2 - libm::atan(d / p.hwhm_hz))
        })
        .sum();
    (scale * mass, (scale - 1.0).abs() * mass.abs())
}
