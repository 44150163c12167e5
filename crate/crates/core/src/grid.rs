//! Frequency grids in Hz.
//!
//! Peak-resolving grids place points at `c + h·sinh(t)` for uniformly spaced
//! `t`, so spacing is a small fraction of the half-width `h` at the peak and
//! grows geometrically away from it.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Points in the default peak-resolving grid.
pub const DEFAULT_POINTS: usize = 1 << 14;
/// Default half-span around each peak, in full widths.
pub const DEFAULT_SPAN_WIDTHS: f64 = 64.0;

/// A spectral peak: centre and half width at half maximum, both in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Peak {
    pub center_hz: f64,
    pub hwhm_hz: f64,
}

impl Peak {
    pub fn new(center_hz: f64, hwhm_hz: f64) -> Self {
        Self { center_hz, hwhm_hz }
    }

    /// Peak of a mode with angular linewidth (FWHM) `rate` at `center_hz`.
    pub fn from_rate(center_hz: f64, rate: f64) -> Self {
        Self { center_hz, hwhm_hz: rate / (4.0 * core::f64::consts::PI) }
    }
}

fn sinh_side(center: f64, hwhm: f64, dist: f64, n: usize, sign: f64, out: &mut Vec<f64>) {
    let t_max = libm::asinh(dist / hwhm);
    let last = (n - 1) as f64;
    for k in 0..n {
        let offset = if k + 1 == n { dist } else { hwhm * libm::sinh(t_max * k as f64 / last) };
        out.push(center + sign * offset);
    }
}

fn finish(mut pts: Vec<f64>) -> Vec<f64> {
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn check(peaks: &[Peak], points: usize, span_widths: f64) -> Result<()> {
    if points < 16 {
        return Err(Error::Domain(alloc::format!("grid needs at least 16 points, got {points}")));
    }
    if !(span_widths > 0.0 && span_widths.is_finite()) {
        return Err(Error::Domain(alloc::format!("grid span must be positive, got {span_widths}")));
    }
    for p in peaks {
        if !(p.hwhm_hz > 0.0 && p.hwhm_hz.is_finite() && p.center_hz.is_finite()) {
            return Err(Error::Domain(alloc::format!("invalid peak {p:?}")));
        }
    }
    Ok(())
}

/// Grid around a single peak, `span_widths` full widths either side.
pub fn single_peak_grid(peak: Peak, points: usize, span_widths: f64) -> Result<Vec<f64>> {
    check(&[peak], points, span_widths)?;
    let dist = 2.0 * span_widths * peak.hwhm_hz;
    let mut pts = Vec::with_capacity(points);
    sinh_side(peak.center_hz, peak.hwhm_hz, dist, points / 2, -1.0, &mut pts);
    sinh_side(peak.center_hz, peak.hwhm_hz, dist, points / 2, 1.0, &mut pts);
    Ok(finish(pts))
}

/// Two-sided lab-frame grid covering the peaks at `±f_m` and the gap between
/// them. Each peak gets `points/4` samples on either side; the inner sides
/// meet at zero frequency.
pub fn lab_frame_grid(f_m_hz: f64, hwhm_hz: f64, points: usize, span_widths: f64) -> Result<Vec<f64>> {
    let peak = Peak::new(f_m_hz, hwhm_hz);
    check(&[peak], points, span_widths)?;
    if !(f_m_hz > 2.0 * span_widths * hwhm_hz) {
        return Err(Error::Domain(alloc::format!(
            "peaks at ±{f_m_hz} Hz overlap for half width {hwhm_hz} Hz"
        )));
    }
    let q = points / 4;
    let outer = 2.0 * span_widths * hwhm_hz;
    let mut pts = Vec::with_capacity(4 * q);
    sinh_side(f_m_hz, hwhm_hz, outer, q, 1.0, &mut pts);
    sinh_side(f_m_hz, hwhm_hz, f_m_hz, q, -1.0, &mut pts);
    sinh_side(-f_m_hz, hwhm_hz, f_m_hz, q, 1.0, &mut pts);
    sinh_side(-f_m_hz, hwhm_hz, outer, q, -1.0, &mut pts);
    Ok(finish(pts))
}

/// Rotating-frame grid: one peak at zero frequency.
pub fn rotating_frame_grid(hwhm_hz: f64, points: usize, span_widths: f64) -> Result<Vec<f64>> {
    single_peak_grid(Peak::new(0.0, hwhm_hz), points, span_widths)
}

/// `bins` uniformly spaced points on `[lo, hi]`, as produced by a swept analyzer.
pub fn uniform_grid(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(alloc::format!("invalid uniform grid [{lo}, {hi}] with {bins} bins")));
    }
    let step = (hi - lo) / (bins - 1) as f64;
    Ok((0..bins).map(|k| if k + 1 == bins { hi } else { lo + step * k as f64 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strictly_increasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1] > w[0])
    }

    #[test]
    fn lab_grid_shape() {
        let g = lab_frame_grid(707.4e3, 1e-3, DEFAULT_POINTS, DEFAULT_SPAN_WIDTHS).unwrap();
        assert!(strictly_increasing(&g));
        // both centres and zero are shared between sides
        assert_eq!(g.len(), DEFAULT_POINTS - 3);
        assert!((g[g.len() - 1] - (707.4e3 + 128e-3)).abs() < 1e-6);
        assert!(g.contains(&707.4e3) && g.contains(&-707.4e3) && g.contains(&0.0));
        // resolves the peak
        let i = g.iter().position(|&f| f == 707.4e3).unwrap();
        assert!(g[i + 1] - g[i] < 1e-2 * 1e-3);
    }

    #[test]
    fn rotating_grid_is_symmetric() {
        let g = rotating_frame_grid(0.5, 1024, 64.0).unwrap();
        assert!(strictly_increasing(&g));
        let n = g.len();
        for k in 0..n {
            assert!((g[k] + g[n - 1 - k]).abs() <= 1e-12 * g[k].abs().max(1.0));
        }
        assert!((g[n - 1] - 64.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(lab_frame_grid(1.0, 1.0, 1024, 64.0).is_err());
        assert!(rotating_frame_grid(0.0, 1024, 64.0).is_err());
        assert!(rotating_frame_grid(1.0, 4, 64.0).is_err());
        assert!(uniform_grid(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn uniform_endpoints_exact() {
        let g = uniform_grid(-3.0, 7.0, 11).unwrap();
        assert_eq!(g[0], -3.0);
        assert_eq!(g[10], 7.0);
        assert_eq!(g[5], 2.0);
    }
}
