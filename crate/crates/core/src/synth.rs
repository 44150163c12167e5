//! Synthetic measured spectra and sweeps.
//!
//! Each trace is an ideal spectrum passed through a measurement chain and
//! multiplied bin by bin by `Gamma(N, 1/N)` noise, the distribution of an
//! average of `N` exponential periodogram bins. Every sweep point draws from
//! its own ChaCha stream, selected by the point index, so points can be
//! generated in any order or in parallel with identical results.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::constants::{rad_to_hz, TWO_PI};
use crate::error::{Error, Result};
use crate::grid::{uniform_grid, Peak};
use crate::params::{bose_occupation, BathState, CoolingTone, DriveScheme, Regime, SystemParams};
use crate::spectra::{
    bae_output_gain, output_spectrum_bae, variance_good_cavity, BaeMechanics, Components, Frame, SpectrumTrace,
    TraceMeta,
};

/// Gain and added noise between the device and the recorded spectrum.
/// Attenuation is lumped into the gain.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementChain {
    pub gain: f64,
    /// Amplifier added noise, quanta referred to the device output.
    pub n_add: f64,
}

impl MeasurementChain {
    pub const IDEAL: MeasurementChain = MeasurementChain { gain: 1.0, n_add: 0.0 };

    pub fn new(gain: f64, n_add: f64) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::Domain(alloc::format!("chain gain must be positive, got {gain}")));
        }
        if !(n_add >= 0.0 && n_add.is_finite()) {
            return Err(Error::Domain(alloc::format!("added noise must be >= 0, got {n_add}")));
        }
        Ok(Self { gain, n_add })
    }
}

/// Number of periodograms averaged per bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Averaging {
    Finite(u32),
    /// Noiseless: the ideal trace.
    Infinite,
}

/// Spectrum analyzer settings: a uniform grid centred on the expected peak.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Analyzer {
    pub bins: usize,
    /// Half span in full widths of the expected peak.
    pub span_widths: f64,
    pub averaging: Averaging,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self { bins: 801, span_widths: 32.0, averaging: Averaging::Finite(100) }
    }
}

impl Analyzer {
    /// Grid in Hz for a peak of angular FWHM `linewidth`, centred at zero.
    pub fn grid(&self, linewidth: f64) -> Result<Vec<f64>> {
        let half = self.span_widths * rad_to_hz(linewidth);
        uniform_grid(-half, half, self.bins)
    }
}

/// `a·P^b`; identically zero when `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn eval(&self, power: f64) -> f64 {
        if self.coefficient == 0.0 || power <= 0.0 {
            0.0
        } else {
            self.coefficient * libm::pow(power, self.exponent)
        }
    }
}

/// Phenomenological pump heating of the mechanical and cavity baths:
/// `n(P) = n(0) + a·P^b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatingModel {
    pub mechanical: PowerLaw,
    pub cavity: PowerLaw,
}

impl HeatingModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for law in [self.mechanical, self.cavity] {
            if !(law.coefficient >= 0.0 && law.exponent >= 0.0 && law.coefficient.is_finite() && law.exponent.is_finite())
            {
                return Err(Error::Domain(alloc::format!("heating coefficients must be >= 0, got {law:?}")));
            }
        }
        Ok(())
    }

    /// Heated `(n_m^T, n_c^T)` at generator power `power`.
    #[allow(non_snake_case)]
    pub fn apply(&self, n_m_T: f64, n_c_T: f64, power: f64) -> (f64, f64) {
        (n_m_T + self.mechanical.eval(power), n_c_T + self.cavity.eval(power))
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multiplies every bin by an independent `Gamma(N, 1/N)` draw.
pub fn apply_averaging_noise(values: &mut [f64], averaging: Averaging, rng: &mut ChaCha8Rng) -> Result<()> {
    if let Averaging::Finite(n) = averaging {
        if n == 0 {
            return Err(Error::Domain(alloc::string::String::from("averaging count must be >= 1")));
        }
        let n = f64::from(n);
        let dist = Gamma::new(n, 1.0 / n).map_err(|e| Error::Domain(alloc::format!("{e}")))?;
        for v in values.iter_mut() {
            *v *= dist.sample(rng);
        }
    }
    Ok(())
}

fn noisy(mut ideal: SpectrumTrace, analyzer: &Analyzer, rng: &mut ChaCha8Rng, seed: u64) -> Result<SpectrumTrace> {
    if analyzer.averaging != Averaging::Infinite {
        apply_averaging_noise(&mut ideal.total, analyzer.averaging, rng)?;
        ideal.components = None;
    }
    ideal.meta.seed = Some(seed);
    Ok(ideal)
}

fn jitter(rng: &mut ChaCha8Rng, sigma_hz: f64) -> Result<f64> {
    if sigma_hz == 0.0 {
        return Ok(0.0);
    }
    let d = Normal::new(0.0, sigma_hz).map_err(|e| Error::Domain(alloc::format!("{e}")))?;
    Ok(d.sample(rng))
}

/// Evaluates `make` on the grid shifted by `offset_hz` and relabels the
/// result onto the analyzer grid.
fn shifted<F>(grid: &[f64], offset_hz: f64, make: F) -> Result<SpectrumTrace>
where
    F: FnOnce(&[f64]) -> Result<SpectrumTrace>,
{
    if offset_hz == 0.0 {
        return make(grid);
    }
    let moved: Vec<f64> = grid.iter().map(|f| f - offset_hz).collect();
    let mut t = make(&moved)?;
    t.freq_hz = grid.to_vec();
    for p in &mut t.meta.peaks {
        p.center_hz += offset_hz;
    }
    Ok(t)
}

/// A single BAE output-spectrum measurement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OutputScenario {
    pub params: SystemParams,
    pub drive: DriveScheme,
    pub baths: BathState,
    pub analyzer: Analyzer,
    pub chain: MeasurementChain,
}

/// Noisy detected BAE output spectrum for `scenario`.
pub fn synth_output_trace(scenario: &OutputScenario, seed: u64) -> Result<SpectrumTrace> {
    let mech = BaeMechanics::resolve(&scenario.params, &scenario.drive, &scenario.baths)?;
    let grid = scenario.analyzer.grid(mech.gamma_eff)?;
    let ideal = output_spectrum_bae(
        &grid,
        &scenario.params,
        &scenario.drive,
        &scenario.baths,
        mech,
        Some(&scenario.chain),
    )?;
    let mut rng = rng_for(seed, 0);
    noisy(ideal, &scenario.analyzer, &mut rng, seed)
}

/// Detected output of a red-sideband pumped mode, near the mechanical sideband:
/// `1/2 + (4κ_e/κ)n_c^T + (κ_e/κ)γ_opt·γ_eff/(δ² + (γ_eff/2)²)·n_m`, with `δ`
/// the offset from the sideband and `n_m` the cooled occupation.
#[allow(non_snake_case)]
pub fn sideband_output_spectrum(
    grid_hz: &[f64],
    params: &SystemParams,
    coupling: f64,
    n_m_T: f64,
    n_c_T: f64,
    chain: &MeasurementChain,
) -> Result<SpectrumTrace> {
    let gamma_opt = 4.0 * coupling * coupling / params.kappa();
    let gamma_eff = params.gamma + gamma_opt;
    let c = gamma_opt / params.gamma;
    let n_m = variance_good_cavity(c, n_m_T, n_c_T)?.cooled_occupation.unwrap_or(n_m_T);
    let eta = params.kappa_e / params.kappa();
    let hw2 = gamma_eff * gamma_eff / 4.0;
    let mut comp = Components::zeros(grid_hz.len());
    for (i, &f) in grid_hz.iter().enumerate() {
        let w = TWO_PI * f;
        comp.vacuum[i] = 0.5;
        comp.classical[i] = 4.0 * eta * n_c_T;
        comp.thermal[i] = eta * gamma_opt * gamma_eff / (w * w + hw2) * n_m;
    }
    let meta = TraceMeta {
        regime: Some(Regime::RedSidebandSingleTone),
        params_hash: Some(params.fingerprint()),
        seed: None,
        peaks: alloc::vec![Peak::from_rate(0.0, gamma_eff)],
    };
    Ok(SpectrumTrace::from_components(grid_hz.to_vec(), comp, Frame::Rotating)?
        .with_meta(meta)
        .through_chain(chain.gain, chain.n_add))
}

/// What a sweep steps through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepKind {
    /// Cryostat temperature (K), BAE readout.
    Temperature,
    /// Generator power of the BAE tones (arbitrary power units).
    Power,
    /// Generator power of a single red-sideband tone (same units).
    Pump,
}

/// Hidden per-point values used only to score calibrations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct PointTruth {
    pub axis: f64,
    /// Cooperativity of the measurement tone(s).
    pub cooperativity: f64,
    /// Linewidth of the measured peak, rad/s.
    pub gamma_eff: f64,
    /// Mode temperature, K.
    pub temperature_k: f64,
    pub n_m_T: f64,
    pub n_c_T: f64,
    /// Energy of the measured quadrature (BAE) or cooled occupation (pump).
    pub x2: f64,
    /// Device-level peak area, photons/s.
    pub flux: f64,
    /// Peak area in recorded units (gain included).
    pub detected_area: f64,
    pub center_hz: f64,
}

/// Sweep-level hidden values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetTruth {
    /// `𝒥` in rad²/s² per power unit, when the sweep uses generator power.
    pub coupling_per_power: Option<f64>,
    pub chain: MeasurementChain,
    pub points: Vec<PointTruth>,
}

/// What the calibration pipeline is allowed to see.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlindDataset {
    pub kind: SweepKind,
    pub axis: Vec<f64>,
    pub traces: Vec<SpectrumTrace>,
    /// Device characterisation known to the experimenter.
    pub params: SystemParams,
    /// Cryostat temperature during power and pump sweeps.
    pub base_temperature_k: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    pub blind: BlindDataset,
    pub truth: DatasetTruth,
}

/// A sweep whose points can be generated independently.
pub trait Sweep: Sync {
    fn kind(&self) -> SweepKind;
    fn params(&self) -> &SystemParams;
    fn axis(&self) -> Vec<f64>;
    fn chain(&self) -> MeasurementChain;
    fn coupling_per_power(&self) -> Option<f64> {
        None
    }
    fn base_temperature_k(&self) -> Option<f64> {
        None
    }
    fn validate(&self) -> Result<()>;
    /// Point `k` of the sweep under master seed `seed`.
    fn point(&self, k: usize, seed: u64) -> Result<(SpectrumTrace, PointTruth)>;
}

/// Collects generated points into a dataset.
pub fn assemble<S: Sweep + ?Sized>(sweep: &S, points: Vec<(SpectrumTrace, PointTruth)>, seed: u64) -> SweepDataset {
    let (traces, truths): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    SweepDataset {
        blind: BlindDataset {
            kind: sweep.kind(),
            axis: sweep.axis(),
            traces,
            params: *sweep.params(),
            base_temperature_k: sweep.base_temperature_k(),
            seed,
        },
        truth: DatasetTruth { coupling_per_power: sweep.coupling_per_power(), chain: sweep.chain(), points: truths },
    }
}

/// Generates every point in order.
pub fn synth_sweep<S: Sweep + ?Sized>(sweep: &S, seed: u64) -> Result<SweepDataset> {
    sweep.validate()?;
    let points = (0..sweep.axis().len()).map(|k| sweep.point(k, seed)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(sweep, points, seed))
}

fn check_chain_and_analyzer(chain: &MeasurementChain, analyzer: &Analyzer) -> Result<()> {
    MeasurementChain::new(chain.gain, chain.n_add)?;
    if analyzer.bins < 16 || !(analyzer.span_widths > 0.0) {
        return Err(Error::Domain(alloc::format!("invalid analyzer settings {analyzer:?}")));
    }
    if analyzer.averaging == Averaging::Finite(0) {
        return Err(Error::Domain(alloc::string::String::from("averaging count must be >= 1")));
    }
    Ok(())
}

fn check_list(name: &str, values: &[f64], allow_zero: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Domain(alloc::format!("{name} list is empty")));
    }
    for &v in values {
        if !(v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0))) {
            return Err(Error::Domain(alloc::format!("invalid {name} value {v}")));
        }
    }
    Ok(())
}

/// BAE readout while the cryostat temperature is stepped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct TemperatureSweepConfig {
    pub params: SystemParams,
    /// Per-tone BAE cooperativity.
    pub cooperativity: f64,
    pub cooling: Option<CoolingTone>,
    pub temperatures_k: Vec<f64>,
    /// Mode temperature is `max(T, T_floor)`.
    pub t_floor_k: Option<f64>,
    pub n_I_T: f64,
    pub chain: MeasurementChain,
    pub analyzer: Analyzer,
    /// Standard deviation of the per-point mechanical frequency jump, Hz.
    pub jitter_hz: f64,
}

impl TemperatureSweepConfig {
    fn drive(&self) -> DriveScheme {
        match DriveScheme::with_cooperativity(Regime::TwoToneBae, &self.params, self.cooperativity) {
            DriveScheme::TwoToneBae { coupling, theta, .. } => {
                DriveScheme::TwoToneBae { coupling, theta, cooling: self.cooling }
            }
            other => other,
        }
    }

    /// Mode temperature at cryostat temperature `t`.
    pub fn mode_temperature(&self, t: f64) -> f64 {
        self.t_floor_k.map_or(t, |floor| t.max(floor))
    }
}

impl Sweep for TemperatureSweepConfig {
    fn kind(&self) -> SweepKind {
        SweepKind::Temperature
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn axis(&self) -> Vec<f64> {
        self.temperatures_k.clone()
    }

    fn chain(&self) -> MeasurementChain {
        self.chain
    }

    fn validate(&self) -> Result<()> {
        check_list("temperature", &self.temperatures_k, false)?;
        check_chain_and_analyzer(&self.chain, &self.analyzer)?;
        if !(self.cooperativity > 0.0 && self.cooperativity.is_finite()) {
            return Err(Error::Domain(alloc::format!("BAE cooperativity must be positive, got {}", self.cooperativity)));
        }
        BathState::new(0.0, self.n_I_T)?;
        Ok(())
    }

    fn point(&self, k: usize, seed: u64) -> Result<(SpectrumTrace, PointTruth)> {
        let t = self.temperatures_k[k];
        let t_mode = self.mode_temperature(t);
        let baths = BathState::at_temperature(&self.params, t_mode, self.n_I_T)?;
        let drive = self.drive();
        let mech = BaeMechanics::resolve(&self.params, &drive, &baths)?;
        let mut rng = rng_for(seed, k as u64);
        let center = jitter(&mut rng, self.jitter_hz)?;
        let grid = self.analyzer.grid(mech.gamma_eff)?;
        let ideal = shifted(&grid, center, |g| {
            output_spectrum_bae(g, &self.params, &drive, &baths, mech, Some(&self.chain))
        })?;
        let x2 = 0.5 + mech.n_m;
        let flux = bae_output_gain(&self.params, drive.coupling()) * x2;
        let truth = PointTruth {
            axis: t,
            cooperativity: self.cooperativity,
            gamma_eff: mech.gamma_eff,
            temperature_k: t_mode,
            n_m_T: baths.n_m_T,
            n_c_T: baths.n_c_T(&self.params),
            x2,
            flux,
            detected_area: self.chain.gain * flux,
            center_hz: center,
        };
        Ok((noisy(ideal, &self.analyzer, &mut rng, seed)?, truth))
    }
}

/// Generator power that gives cooperativity `c` when `G² = 𝒥·P`.
pub fn power_for_cooperativity(params: &SystemParams, coupling_per_power: f64, c: f64) -> f64 {
    c * params.kappa() * params.gamma / (4.0 * coupling_per_power)
}

/// BAE readout while the power of both tones is stepped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct PowerSweepConfig {
    pub params: SystemParams,
    /// Target per-tone cooperativities; generator powers follow from `𝒥`.
    pub cooperativities: Vec<f64>,
    /// Hidden `𝒥`: `G² = 𝒥·P`, rad²/s² per power unit.
    pub coupling_per_power: f64,
    pub temperature_k: f64,
    pub n_I_T: f64,
    pub cooling: Option<CoolingTone>,
    pub heating: HeatingModel,
    pub chain: MeasurementChain,
    pub analyzer: Analyzer,
    pub jitter_hz: f64,
}

impl Sweep for PowerSweepConfig {
    fn kind(&self) -> SweepKind {
        SweepKind::Power
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn axis(&self) -> Vec<f64> {
        self.cooperativities.iter().map(|&c| power_for_cooperativity(&self.params, self.coupling_per_power, c)).collect()
    }

    fn chain(&self) -> MeasurementChain {
        self.chain
    }

    fn coupling_per_power(&self) -> Option<f64> {
        Some(self.coupling_per_power)
    }

    fn base_temperature_k(&self) -> Option<f64> {
        Some(self.temperature_k)
    }

    fn validate(&self) -> Result<()> {
        check_list("cooperativity", &self.cooperativities, false)?;
        check_chain_and_analyzer(&self.chain, &self.analyzer)?;
        check_list("coupling_per_power", &[self.coupling_per_power], false)?;
        check_list("temperature", &[self.temperature_k], false)?;
        self.heating.validate()?;
        BathState::new(0.0, self.n_I_T)?;
        Ok(())
    }

    fn point(&self, k: usize, seed: u64) -> Result<(SpectrumTrace, PointTruth)> {
        let power = self.axis()[k];
        let coupling = libm::sqrt(self.coupling_per_power * power);
        let drive = DriveScheme::TwoToneBae { coupling, theta: 0.0, cooling: self.cooling };
        let n_m0 = bose_occupation(self.temperature_k, self.params.omega_m)?;
        let n_c0 = self.n_I_T * self.params.kappa_i / self.params.kappa();
        let (n_m, n_c) = self.heating.apply(n_m0, n_c0, power);
        let baths = BathState::with_cavity_occupation(&self.params, n_m, n_c)?;
        let mech = BaeMechanics::resolve(&self.params, &drive, &baths)?;
        let mut rng = rng_for(seed, k as u64);
        let center = jitter(&mut rng, self.jitter_hz)?;
        let grid = self.analyzer.grid(mech.gamma_eff)?;
        let ideal = shifted(&grid, center, |g| {
            output_spectrum_bae(g, &self.params, &drive, &baths, mech, Some(&self.chain))
        })?;
        let x2 = 0.5 + mech.n_m;
        let flux = bae_output_gain(&self.params, coupling) * x2;
        let truth = PointTruth {
            axis: power,
            cooperativity: 4.0 * coupling * coupling / (self.params.kappa() * self.params.gamma),
            gamma_eff: mech.gamma_eff,
            temperature_k: self.temperature_k,
            n_m_T: n_m,
            n_c_T: n_c,
            x2,
            flux,
            detected_area: self.chain.gain * flux,
            center_hz: center,
        };
        Ok((noisy(ideal, &self.analyzer, &mut rng, seed)?, truth))
    }
}

/// Single red-sideband tone stepped in power; the linewidth tracks `γ + ℒP`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[allow(non_snake_case)]
pub struct PumpSweepConfig {
    pub params: SystemParams,
    pub cooperativities: Vec<f64>,
    pub coupling_per_power: f64,
    pub temperature_k: f64,
    pub n_I_T: f64,
    pub chain: MeasurementChain,
    pub analyzer: Analyzer,
    pub jitter_hz: f64,
}

impl Sweep for PumpSweepConfig {
    fn kind(&self) -> SweepKind {
        SweepKind::Pump
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn axis(&self) -> Vec<f64> {
        self.cooperativities.iter().map(|&c| power_for_cooperativity(&self.params, self.coupling_per_power, c)).collect()
    }

    fn chain(&self) -> MeasurementChain {
        self.chain
    }

    fn coupling_per_power(&self) -> Option<f64> {
        Some(self.coupling_per_power)
    }

    fn base_temperature_k(&self) -> Option<f64> {
        Some(self.temperature_k)
    }

    fn validate(&self) -> Result<()> {
        check_list("cooperativity", &self.cooperativities, false)?;
        check_chain_and_analyzer(&self.chain, &self.analyzer)?;
        check_list("coupling_per_power", &[self.coupling_per_power], false)?;
        check_list("temperature", &[self.temperature_k], false)?;
        BathState::new(0.0, self.n_I_T)?;
        Ok(())
    }

    fn point(&self, k: usize, seed: u64) -> Result<(SpectrumTrace, PointTruth)> {
        let power = self.axis()[k];
        let coupling = libm::sqrt(self.coupling_per_power * power);
        let n_m = bose_occupation(self.temperature_k, self.params.omega_m)?;
        let n_c = self.n_I_T * self.params.kappa_i / self.params.kappa();
        let gamma_opt = 4.0 * coupling * coupling / self.params.kappa();
        let gamma_eff = self.params.gamma + gamma_opt;
        let mut rng = rng_for(seed, k as u64);
        let center = jitter(&mut rng, self.jitter_hz)?;
        let grid = self.analyzer.grid(gamma_eff)?;
        let ideal =
            shifted(&grid, center, |g| sideband_output_spectrum(g, &self.params, coupling, n_m, n_c, &self.chain))?;
        let c = gamma_opt / self.params.gamma;
        let cooled = variance_good_cavity(c, n_m, n_c)?.cooled_occupation.unwrap_or(n_m);
        let flux = self.params.kappa_e / self.params.kappa() * gamma_opt * cooled;
        let truth = PointTruth {
            axis: power,
            cooperativity: c,
            gamma_eff,
            temperature_k: self.temperature_k,
            n_m_T: n_m,
            n_c_T: n_c,
            x2: cooled,
            flux,
            detected_area: self.chain.gain * flux,
            center_hz: center,
        };
        Ok((noisy(ideal, &self.analyzer, &mut rng, seed)?, truth))
    }
}

pub fn synth_temperature_sweep(config: &TemperatureSweepConfig, seed: u64) -> Result<SweepDataset> {
    synth_sweep(config, seed)
}

pub fn synth_power_sweep(config: &PowerSweepConfig, seed: u64) -> Result<SweepDataset> {
    synth_sweep(config, seed)
}

pub fn synth_pump_sweep(config: &PumpSweepConfig, seed: u64) -> Result<SweepDataset> {
    synth_sweep(config, seed)
}
