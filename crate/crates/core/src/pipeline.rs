//! The full calibration chain: pump sweep, temperature sweep, BAE power
//! sweep, then the backaction comparison. Stages run in order and hand their
//! results forward explicitly.

use alloc::string::String;
use alloc::vec::Vec;

use crate::calibrate::{
    base_occupation, calibrate_bae_flux, calibrate_pump, calibrate_temperature_sweep, evaluate_bae_evasion,
    reference_quadrature_energy, BaeFluxCalibration, BaeFluxPoint, BaseOccupation, CalibrationResult, EvasionReport,
    FluxPoint, LinearWindow, LinewidthPoint, PumpCalibration, TemperatureCalibration, DEFAULT_FIT_BAND_K,
};
use crate::error::{Error, Result};
use crate::fit::{fit_linear, fit_lorentzian, LinearFit, LorentzianFit};
use crate::spectra::SpectrumTrace;
use crate::synth::{BlindDataset, SweepKind};

/// Where the cooling-tone cooperativity behind `⟨X²⟩₀` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CoolingReference {
    /// No cooling tone during the BAE sweep.
    #[default]
    None,
    /// Cooperativity known from a separate sideband-cooling calibration.
    Known(f64),
    /// `γ_eff/γ − 1` from the mean fitted BAE linewidth.
    FromLinewidth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
#[allow(non_snake_case)]
pub struct PipelineConfig {
    /// Temperatures (K) treated as thermalised when fitting `ℋ`.
    pub fit_band_k: (f64, f64),
    pub base_occupation: BaseOccupation,
    pub linear_window: LinearWindow,
    pub cooling: CoolingReference,
    /// Cavity occupation assumed for `⟨X²⟩₀`.
    pub n_c_T: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fit_band_k: DEFAULT_FIT_BAND_K,
            base_occupation: BaseOccupation::default(),
            linear_window: LinearWindow::default(),
            cooling: CoolingReference::default(),
            n_c_T: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stage {
    Input,
    PumpCalibration,
    TemperatureCalibration,
    Reference,
    BaeFluxCalibration,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Input => "input",
            Stage::PumpCalibration => "pump_calibration",
            Stage::TemperatureCalibration => "temperature_calibration",
            Stage::Reference => "reference",
            Stage::BaeFluxCalibration => "bae_flux_calibration",
        }
    }
}

/// A pipeline failure and the stage it happened in.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} stage failed: {error}", .stage.name())]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
}

fn at(stage: Stage) -> impl Fn(Error) -> PipelineError {
    move |error| PipelineError { stage, error }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineWarning {
    pub stage: Stage,
    /// Index into the stage's dataset.
    pub index: Option<usize>,
    pub message: String,
}

/// One row of the power-sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub cooperativity: f64,
    pub linewidth_hz: f64,
    pub flux: f64,
    pub x2: f64,
    pub model_bad: f64,
    pub model_good: f64,
    pub model_bae_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineReport {
    pub pump_calibration: PumpCalibration,
    pub temperature_calibration: TemperatureCalibration,
    pub bae_flux_calibration: BaeFluxCalibration,
    pub evasion_report: EvasionReport,
    pub calibration: CalibrationResult,
    /// Fitted BAE linewidth (Hz) against cooperativity; flat for an ideal
    /// measurement.
    pub linewidth_trend: Option<LinearFit>,
    pub warnings: Vec<PipelineWarning>,
}

impl PipelineReport {
    pub fn sweep_rows(&self) -> Vec<SweepRow> {
        self.bae_flux_calibration
            .points
            .iter()
            .zip(&self.evasion_report.points)
            .map(|(q, e)| SweepRow {
                cooperativity: q.cooperativity,
                linewidth_hz: q.linewidth_hz,
                flux: q.flux,
                x2: q.x2,
                model_bad: e.model_bad,
                model_good: e.model_good,
                model_bae_p: e.model_bae_p,
            })
            .collect()
    }
}

/// Fits every trace in order. Callers with threads can substitute a parallel
/// map through [`run_pipeline_with`].
pub fn fit_traces_sequential(traces: &[SpectrumTrace]) -> Vec<Result<LorentzianFit>> {
    traces.iter().map(fit_lorentzian).collect()
}

fn check_kind(d: &BlindDataset, kind: SweepKind) -> core::result::Result<(), PipelineError> {
    if d.kind != kind {
        return Err(PipelineError {
            stage: Stage::Input,
            error: Error::Calibration(alloc::format!("expected a {kind:?} dataset, got {:?}", d.kind)),
        });
    }
    if d.axis.len() != d.traces.len() {
        return Err(PipelineError {
            stage: Stage::Input,
            error: Error::Calibration(alloc::format!(
                "{kind:?} dataset has {} axis values and {} traces",
                d.axis.len(),
                d.traces.len()
            )),
        });
    }
    Ok(())
}

/// Fits a dataset and keeps the usable points, warning about the rest.
fn usable_fits<F>(
    d: &BlindDataset,
    stage: Stage,
    fit_all: &F,
    warnings: &mut Vec<PipelineWarning>,
) -> Vec<(usize, LorentzianFit)>
where
    F: Fn(&[SpectrumTrace]) -> Vec<Result<LorentzianFit>>,
{
    let mut out = Vec::new();
    for (k, r) in fit_all(&d.traces).into_iter().enumerate() {
        match r {
            Ok(f) if !f.low_confidence => out.push((k, f)),
            Ok(_) => warnings.push(PipelineWarning {
                stage,
                index: Some(k),
                message: String::from("low-confidence peak fit; point excluded"),
            }),
            Err(e) => warnings.push(PipelineWarning {
                stage,
                index: Some(k),
                message: alloc::format!("peak fit failed ({e}); point excluded"),
            }),
        }
    }
    out
}

/// Runs the chain with sequential fits.
pub fn run_pipeline(
    pump: &BlindDataset,
    temperature: &BlindDataset,
    power: &BlindDataset,
    config: &PipelineConfig,
) -> core::result::Result<PipelineReport, PipelineError> {
    run_pipeline_with(pump, temperature, power, config, &fit_traces_sequential)
}

pub fn run_pipeline_with<F>(
    pump: &BlindDataset,
    temperature: &BlindDataset,
    power: &BlindDataset,
    config: &PipelineConfig,
    fit_all: &F,
) -> core::result::Result<PipelineReport, PipelineError>
where
    F: Fn(&[SpectrumTrace]) -> Vec<Result<LorentzianFit>>,
{
    check_kind(pump, SweepKind::Pump)?;
    check_kind(temperature, SweepKind::Temperature)?;
    check_kind(power, SweepKind::Power)?;
    let params = power.params;
    let mut warnings = Vec::new();

    let fits = usable_fits(pump, Stage::PumpCalibration, fit_all, &mut warnings);
    let pts: Vec<LinewidthPoint> = fits.iter().map(|(k, f)| LinewidthPoint::from_fit(pump.axis[*k], f)).collect();
    let pump_cal = calibrate_pump(&pts, &params).map_err(at(Stage::PumpCalibration))?;
    for w in &pump_cal.warnings {
        warnings.push(PipelineWarning {
            stage: Stage::PumpCalibration,
            index: w.index.map(|i| fits[i].0),
            message: w.message.clone(),
        });
    }

    let fits = usable_fits(temperature, Stage::TemperatureCalibration, fit_all, &mut warnings);
    let pts: Vec<FluxPoint> = fits.iter().map(|(k, f)| FluxPoint::from_fit(temperature.axis[*k], f)).collect();
    let temp_cal =
        calibrate_temperature_sweep(&pts, &params, config.fit_band_k).map_err(at(Stage::TemperatureCalibration))?;
    for w in &temp_cal.warnings {
        warnings.push(PipelineWarning {
            stage: Stage::TemperatureCalibration,
            index: w.index.map(|i| fits[i].0),
            message: w.message.clone(),
        });
    }

    let fits = usable_fits(power, Stage::BaeFluxCalibration, fit_all, &mut warnings);
    let c_cool = match config.cooling {
        CoolingReference::None => 0.0,
        CoolingReference::Known(c) => c,
        CoolingReference::FromLinewidth => {
            if fits.is_empty() {
                return Err(PipelineError {
                    stage: Stage::Reference,
                    error: Error::Calibration(String::from("no BAE linewidths to infer the cooling tone from")),
                });
            }
            let mean = fits.iter().map(|(_, f)| f.linewidth_hz).sum::<f64>() / fits.len() as f64;
            (mean / params.gamma_hz() - 1.0).max(0.0)
        }
    };
    let n0 = base_occupation(&temp_cal, config.base_occupation, &params, power.base_temperature_k)
        .map_err(at(Stage::Reference))?;
    let x2_ref = reference_quadrature_energy(c_cool, n0, config.n_c_T).map_err(at(Stage::Reference))?;

    let pts: Vec<BaeFluxPoint> = fits
        .iter()
        .map(|(k, f)| BaeFluxPoint {
            cooperativity: pump_cal.cooperativity(power.axis[*k]),
            flux: f.area,
            flux_se: f.area_se,
            linewidth_hz: f.linewidth_hz,
            linewidth_se: f.linewidth_se,
        })
        .collect();
    let bae_cal = calibrate_bae_flux(&pts, x2_ref, config.linear_window).map_err(at(Stage::BaeFluxCalibration))?;
    let evasion = evaluate_bae_evasion(&bae_cal.points, bae_cal.x2_ref);

    let linewidth_trend = {
        let xs: Vec<f64> = bae_cal.points.iter().map(|q| q.cooperativity).collect();
        let ys: Vec<f64> = bae_cal.points.iter().map(|q| q.linewidth_hz).collect();
        let w: Vec<f64> = bae_cal.points.iter().map(|q| 1.0 / (q.linewidth_se * q.linewidth_se)).collect();
        let w = w.iter().all(|v| v.is_finite() && *v > 0.0).then_some(w);
        fit_linear(&xs, &ys, w.as_deref()).ok()
    };

    let calibration = CalibrationResult {
        damping_per_power: pump_cal.damping_per_power,
        damping_per_power_se: pump_cal.damping_per_power_se,
        coupling_per_power: pump_cal.coupling_per_power,
        coupling_per_power_se: pump_cal.coupling_per_power_se,
        flux_per_kelvin: temp_cal.flux_per_kelvin,
        flux_per_kelvin_se: temp_cal.flux_per_kelvin_se,
        flux_per_cooperativity: bae_cal.flux_per_cooperativity,
        flux_per_cooperativity_se: bae_cal.flux_per_cooperativity_se,
        n_m_T0: n0.0,
        n_m_T0_se: n0.1,
        cooling_cooperativity: c_cool,
        x2_ref: x2_ref.0,
        x2_ref_se: x2_ref.1,
    };
    Ok(PipelineReport {
        pump_calibration: pump_cal,
        temperature_calibration: temp_cal,
        bae_flux_calibration: bae_cal,
        evasion_report: evasion,
        calibration,
        linewidth_trend,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use crate::synth::{
        synth_power_sweep, synth_pump_sweep, synth_temperature_sweep, Analyzer, Averaging, HeatingModel,
        MeasurementChain, PowerSweepConfig, PumpSweepConfig, TemperatureSweepConfig,
    };

    const J: f64 = 2.5e3;

    fn datasets(averaging: Averaging, seed: u64) -> (BlindDataset, BlindDataset, BlindDataset) {
        let params = SystemParams::membrane_device();
        let chain = MeasurementChain::new(3.0e4, 20.0).unwrap();
        let analyzer = Analyzer { bins: 401, span_widths: 16.0, averaging };
        let pump = PumpSweepConfig {
            params,
            cooperativities: alloc::vec![1.0e2, 3.0e2, 1.0e3, 3.0e3],
            coupling_per_power: J,
            temperature_k: 0.037,
            n_I_T: 0.0,
            chain,
            analyzer,
            jitter_hz: 0.0,
        };
        let temp = TemperatureSweepConfig {
            params,
            cooperativity: 2.0,
            cooling: None,
            temperatures_k: alloc::vec![0.037, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
            t_floor_k: None,
            n_I_T: 0.0,
            chain,
            analyzer,
            jitter_hz: 0.0,
        };
        let power = PowerSweepConfig {
            params,
            cooperativities: alloc::vec![0.5, 1.0, 2.0, 5.0, 10.0],
            coupling_per_power: J,
            temperature_k: 0.037,
            n_I_T: 0.0,
            cooling: None,
            heating: HeatingModel::none(),
            chain,
            analyzer,
            jitter_hz: 0.0,
        };
        (
            synth_pump_sweep(&pump, seed).unwrap().blind,
            synth_temperature_sweep(&temp, seed).unwrap().blind,
            synth_power_sweep(&power, seed).unwrap().blind,
        )
    }

    #[test]
    fn noiseless_round_trip() {
        let (pump, temp, power) = datasets(Averaging::Infinite, 1);
        let r = run_pipeline(&pump, &temp, &power, &PipelineConfig::default()).unwrap();
        let kappa = power.params.kappa();
        assert!((r.calibration.coupling_per_power / J - 1.0).abs() < 1e-6, "{:?}", r.calibration);
        assert!((r.calibration.damping_per_power / (4.0 * J / kappa) - 1.0).abs() < 1e-6);
        for q in &r.bae_flux_calibration.points {
            assert!((q.x2 / r.calibration.x2_ref - 1.0).abs() < 1e-6);
        }
        assert_eq!(r.bae_flux_calibration.window, 5);
        assert_eq!(r.sweep_rows().len(), 5);
    }

    #[test]
    fn wrong_dataset_is_an_input_error() {
        let (pump, temp, power) = datasets(Averaging::Infinite, 1);
        let e = run_pipeline(&temp, &pump, &power, &PipelineConfig::default()).unwrap_err();
        assert_eq!(e.stage, Stage::Input);
    }

    #[test]
    fn band_without_points_names_the_stage() {
        let (pump, temp, power) = datasets(Averaging::Infinite, 1);
        let cfg = PipelineConfig { fit_band_k: (1.0, 2.0), ..PipelineConfig::default() };
        let e = run_pipeline(&pump, &temp, &power, &cfg).unwrap_err();
        assert_eq!(e.stage, Stage::TemperatureCalibration);
        assert!(alloc::format!("{e}").starts_with("temperature_calibration"));
    }
}
