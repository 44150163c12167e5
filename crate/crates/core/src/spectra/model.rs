use alloc::vec::Vec;

use super::trace::{Components, Frame, SpectrumTrace, TraceMeta};
use super::variance::variance_good_cavity;
use crate::constants::TWO_PI;
use crate::error::{Error, Result};
use crate::grid::{lab_frame_grid, rotating_frame_grid, Peak, DEFAULT_POINTS, DEFAULT_SPAN_WIDTHS};
use crate::params::{cooperativity, BathState, DriveScheme, Regime, SystemParams};
use crate::response::{transduction_good_cavity, Bath, NoiseChannelSpec, Output, TransductionSet};
use crate::synth::MeasurementChain;

/// The two Lorentzians of a lab-frame oscillator and their symmetric sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianPair {
    /// `1/((ω − ω_m)² + (γ/2)²)`
    pub plus: f64,
    /// `1/((ω + ω_m)² + (γ/2)²)`
    pub minus: f64,
    /// `(γ/2)(ℒ₊ + ℒ₋)`, normalised so `(1/2π)∫S₀dω = 1`.
    pub s0: f64,
}

pub fn lorentzian_pair(omega: f64, gamma: f64, omega_m: f64) -> LorentzianPair {
    let hw2 = gamma * gamma / 4.0;
    let plus = 1.0 / ((omega - omega_m) * (omega - omega_m) + hw2);
    let minus = 1.0 / ((omega + omega_m) * (omega + omega_m) + hw2);
    LorentzianPair { plus, minus, s0: 0.5 * gamma * (plus + minus) }
}

/// Default grid (Hz) for a regime's mechanical spectra: two-sided around
/// `±f_m` for single tones, around zero for BAE. `linewidth` is the
/// effective FWHM in rad/s.
pub fn default_grid(regime: Regime, params: &SystemParams, linewidth: f64) -> Result<Vec<f64>> {
    let hwhm = Peak::from_rate(0.0, linewidth).hwhm_hz;
    match regime {
        Regime::TwoToneBae => rotating_frame_grid(hwhm, DEFAULT_POINTS, DEFAULT_SPAN_WIDTHS),
        _ => lab_frame_grid(params.omega_m_hz(), hwhm, DEFAULT_POINTS, DEFAULT_SPAN_WIDTHS),
    }
}

fn meta(regime: Regime, params: &SystemParams, peaks: Vec<Peak>) -> TraceMeta {
    TraceMeta { regime: Some(regime), params_hash: Some(params.fingerprint()), seed: None, peaks }
}

fn lab_peaks(params: &SystemParams, linewidth: f64) -> Vec<Peak> {
    let f_m = params.omega_m_hz();
    alloc::vec![Peak::from_rate(f_m, linewidth), Peak::from_rate(-f_m, linewidth)]
}

/// Position spectrum with unresolved sidebands:
/// `S_x = (γ/2)ℒ₊ + n_m^T S₀ + C(1 + 2n_c^T)S₀`. The vacuum part peaks only at `+ω_m`.
pub fn spectrum_x_bad_cavity(
    grid_hz: &[f64],
    params: &SystemParams,
    drive: &DriveScheme,
    baths: &BathState,
) -> Result<SpectrumTrace> {
    drive.expect(Regime::BadCavitySingleTone)?;
    if drive.detuning(params) != Some(0.0) {
        return Err(Error::Domain(alloc::string::String::from("unresolved-sideband spectrum requires zero detuning")));
    }
    let c = cooperativity(drive.coupling(), params.kappa(), params.gamma)?;
    let n_c = baths.n_c_T(params);
    let mut comp = Components::zeros(grid_hz.len());
    for (i, &f) in grid_hz.iter().enumerate() {
        let l = lorentzian_pair(TWO_PI * f, params.gamma, params.omega_m);
        comp.vacuum[i] = 0.5 * params.gamma * l.plus;
        comp.thermal[i] = baths.n_m_T * l.s0;
        comp.qba[i] = c * l.s0;
        comp.classical[i] = 2.0 * c * n_c * l.s0;
    }
    Ok(SpectrumTrace::from_components(grid_hz.to_vec(), comp, Frame::Lab)?
        .with_meta(meta(Regime::BadCavitySingleTone, params, lab_peaks(params, params.gamma))))
}

/// Spectrum of `output` assembled from per-frequency transduction coefficients:
/// `S = Σ_z |T_z|²(1/2 + n_z)`. Zero-point parts of mechanical channels are
/// booked as vacuum, of cavity channels as quantum backaction; thermal parts
/// as thermal and classical backaction respectively.
pub fn spectrum_from_response<F>(
    grid_hz: &[f64],
    output: Output,
    channels: &[NoiseChannelSpec],
    frame: Frame,
    mut response: F,
) -> Result<SpectrumTrace>
where
    F: FnMut(f64) -> Result<TransductionSet>,
{
    let mut comp = Components::zeros(grid_hz.len());
    for (i, &f) in grid_hz.iter().enumerate() {
        let t = response(TWO_PI * f)?;
        for ch in channels {
            let g = t.get(output, ch.input).norm_sqr();
            let thermal = ch.density - 0.5;
            match ch.bath() {
                Bath::Mechanical => {
                    comp.vacuum[i] += 0.5 * g;
                    comp.thermal[i] += thermal * g;
                }
                Bath::CavityExternal | Bath::CavityInternal => {
                    comp.qba[i] += 0.5 * g;
                    comp.classical[i] += thermal * g;
                }
            }
        }
    }
    SpectrumTrace::from_components(grid_hz.to_vec(), comp, frame)
}

/// Position spectrum under red-sideband cooling, from the resolved-sideband
/// transduction coefficients. Integrates to `[1/2 + n_m^T + C(1/2 + n_c^T)]/(1 + C)`.
pub fn spectrum_x_good_cavity(
    grid_hz: &[f64],
    params: &SystemParams,
    drive: &DriveScheme,
    baths: &BathState,
) -> Result<SpectrumTrace> {
    drive.expect(Regime::RedSidebandSingleTone)?;
    let channels = NoiseChannelSpec::standard(Regime::RedSidebandSingleTone, baths.n_m_T, baths.n_I_T);
    let gamma_eff = params.gamma + 4.0 * drive.coupling() * drive.coupling() / params.kappa();
    let trace = spectrum_from_response(grid_hz, Output::X, &channels, Frame::Lab, |w| {
        transduction_good_cavity(w, params, drive)
    })?;
    Ok(trace.with_meta(meta(Regime::RedSidebandSingleTone, params, lab_peaks(params, gamma_eff))))
}

/// Linewidth and occupation of the mechanical mode seen by the BAE tones.
/// Without a cooling tone these are `γ` and `n_m^T`; with one, the mode is
/// sideband cooled to linewidth `γ_eff` and `⟨X²⟩` from the cooling variance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaeMechanics {
    pub gamma_eff: f64,
    pub n_m: f64,
}

impl BaeMechanics {
    pub fn resolve(params: &SystemParams, drive: &DriveScheme, baths: &BathState) -> Result<Self> {
        drive.expect(Regime::TwoToneBae)?;
        match drive.cooling() {
            None => Ok(Self { gamma_eff: params.gamma, n_m: baths.n_m_T }),
            Some(tone) => {
                let c_cool = tone.cooperativity(params);
                let x2 = variance_good_cavity(c_cool, baths.n_m_T, baths.n_c_T(params))?.total_first();
                Ok(Self { gamma_eff: params.gamma * (1.0 + c_cool), n_m: x2 - 0.5 })
            }
        }
    }

    pub fn peak(&self) -> Peak {
        Peak::from_rate(0.0, self.gamma_eff)
    }
}

/// Rotating-frame quadrature spectra `(S_X, S_P)`:
/// `S_X = γ_e/(ω² + (γ_e/2)²)·(1/2 + n_m)` and
/// `S_P = S_X + 16G²/(κ(ω² + (γ_e/2)²))·(1/2 + n_c^T)`.
pub fn spectrum_quadratures_bae(
    grid_hz: &[f64],
    params: &SystemParams,
    drive: &DriveScheme,
    baths: &BathState,
    mech: BaeMechanics,
) -> Result<(SpectrumTrace, SpectrumTrace)> {
    drive.expect(Regime::TwoToneBae)?;
    let g = drive.coupling();
    let n_c = baths.n_c_T(params);
    let ba = 16.0 * g * g / params.kappa();
    let hw2 = mech.gamma_eff * mech.gamma_eff / 4.0;
    let n = grid_hz.len();
    let (mut x, mut p) = (Components::zeros(n), Components::zeros(n));
    for (i, &f) in grid_hz.iter().enumerate() {
        let w = TWO_PI * f;
        let l = 1.0 / (w * w + hw2);
        x.vacuum[i] = 0.5 * mech.gamma_eff * l;
        x.thermal[i] = mech.n_m * mech.gamma_eff * l;
        p.vacuum[i] = x.vacuum[i];
        p.thermal[i] = x.thermal[i];
        p.qba[i] = 0.5 * ba * l;
        p.classical[i] = n_c * ba * l;
    }
    let m = meta(Regime::TwoToneBae, params, alloc::vec![mech.peak()]);
    Ok((
        SpectrumTrace::from_components(grid_hz.to_vec(), x, Frame::Rotating)?.with_meta(m.clone()),
        SpectrumTrace::from_components(grid_hz.to_vec(), p, Frame::Rotating)?.with_meta(m),
    ))
}

/// `4Cγκ_e/κ = 16G²κ_e/κ²`, the transduction of `S_X` into the output field.
pub fn bae_output_gain(params: &SystemParams, coupling: f64) -> f64 {
    16.0 * coupling * coupling * params.kappa_e / (params.kappa() * params.kappa())
}

/// Output spectrum at the device's external port,
/// `S_out = (4Cγκ_e/κ)S_X + (4κ_e/κ)n_c^T + 1/2`, optionally passed through
/// a measurement chain.
pub fn output_spectrum_bae(
    grid_hz: &[f64],
    params: &SystemParams,
    drive: &DriveScheme,
    baths: &BathState,
    mech: BaeMechanics,
    chain: Option<&MeasurementChain>,
) -> Result<SpectrumTrace> {
    let (sx, _) = spectrum_quadratures_bae(grid_hz, params, drive, baths, mech)?;
    let k = bae_output_gain(params, drive.coupling());
    let cavity = 4.0 * params.kappa_e / params.kappa() * baths.n_c_T(params);
    let xs = sx.components.as_ref().expect("quadrature spectra carry components");
    let n = grid_hz.len();
    let mut comp = Components::zeros(n);
    for i in 0..n {
        comp.vacuum[i] = 0.5 + k * xs.vacuum[i];
        comp.thermal[i] = k * xs.thermal[i];
        comp.classical[i] = cavity;
    }
    let trace = SpectrumTrace::from_components(grid_hz.to_vec(), comp, Frame::Rotating)?.with_meta(sx.meta);
    Ok(match chain {
        Some(c) => trace.through_chain(c.gain, c.n_add),
        None => trace,
    })
}
