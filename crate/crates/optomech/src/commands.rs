//! The four subcommands as library functions; `main` only parses arguments
//! and maps errors to exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use optomech_core::constants::{rad_to_hz, TWO_PI};
use optomech_core::pipeline::{run_pipeline_with, PipelineConfig, PipelineReport};
use optomech_core::selftest::{run_selftest, Check, Mutation};
use optomech_core::spectra::{
    default_grid, integrate_spectrum, output_spectrum_bae, spectrum_quadratures_bae, spectrum_x_bad_cavity,
    spectrum_x_good_cavity, variance, variance_bae, BaeMechanics, TailModel,
};
use optomech_core::synth::{sideband_output_spectrum, MeasurementChain};
use optomech_core::{ConfigWarning, DerivedRates, DriveScheme, Regime, SpectrumTrace, VarianceReport};
use serde::{Deserialize, Serialize};

use crate::config::{load_config, ModelConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::io::{prepare_output, read_dataset, read_json, write_dataset, write_json, write_table, write_trace};
use crate::parallel::{fit_traces_parallel, synth_parallel, thread_pool};

pub const PUMP_DIR: &str = "pump";
pub const TEMPERATURE_DIR: &str = "temperature";
pub const POWER_DIR: &str = "power";
pub const PIPELINE_FILE: &str = "pipeline.json";
pub const REPORT_FILE: &str = "report.json";
pub const SWEEP_TABLE: &str = "sweep.csv";
pub const SWEEP_COLUMNS: [&str; 7] = ["C", "linewidth_hz", "flux", "X2", "model_bad", "model_good", "model_baeP"];
pub const VARIANCE_FILE: &str = "variance.json";

/// `variance.json` written by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct VarianceSummary {
    pub config: ModelConfig,
    pub regime: Regime,
    pub cooperativity: f64,
    /// Cooperativity relative to the measured linewidth, `Cγ/γ_eff`; equals
    /// `cooperativity` unless a cooling tone broadens the BAE mode.
    pub effective_cooperativity: f64,
    pub gamma_opt_hz: f64,
    pub gamma_eff_hz: f64,
    pub intracavity_photons: Option<f64>,
    pub n_c_T: f64,
    pub resolved_sidebands: bool,
    pub warning: Option<ConfigWarning>,
    pub closed_form: VarianceReport,
    /// Numerically integrated mechanical spectra, quanta.
    pub integrated_first: f64,
    pub integrated_second: Option<f64>,
}

fn area(t: &SpectrumTrace) -> Result<f64> {
    Ok(integrate_spectrum(t, None, TailModel::LorentzianAnalytic)?.value)
}

/// Writes the component spectra and closed-form variances of one
/// configuration. Returns the summary and the files written.
pub fn simulate(config: &Path, out: &Path, force: bool) -> Result<(VarianceSummary, Vec<PathBuf>)> {
    let record: ModelConfig = load_config(config)?;
    let checked = record.checked()?;
    let (params, drive) = (checked.params, checked.drive);
    let baths = record.baths(&params)?;
    if matches!(drive, DriveScheme::BadCavitySingleTone { detuning, .. } if detuning != 0.0) {
        return Err(Error::Config("the unresolved-sideband spectra need delta_hz = 0".into()));
    }
    let echo = ModelConfig::from_model(&params, &drive, &baths);
    let rates = DerivedRates::of(&params, &drive)?;
    let c = rates.cooperativity;
    let n_c = baths.n_c_T(&params);
    prepare_output(out, force)?;

    let mut traces: Vec<(&str, SpectrumTrace)> = Vec::new();
    let (closed_form, c_eff, gamma_eff) = match drive.regime() {
        Regime::BadCavitySingleTone => {
            let grid = default_grid(Regime::BadCavitySingleTone, &params, params.gamma)?;
            traces.push(("spectrum_x", spectrum_x_bad_cavity(&grid, &params, &drive, &baths)?));
            (variance(Regime::BadCavitySingleTone, c, baths.n_m_T, n_c)?, c, params.gamma)
        }
        Regime::RedSidebandSingleTone => {
            let grid = default_grid(Regime::RedSidebandSingleTone, &params, rates.gamma_eff)?;
            traces.push(("spectrum_x", spectrum_x_good_cavity(&grid, &params, &drive, &baths)?));
            let out_grid = default_grid(Regime::TwoToneBae, &params, rates.gamma_eff)?;
            let output = sideband_output_spectrum(
                &out_grid,
                &params,
                drive.coupling(),
                baths.n_m_T,
                n_c,
                &MeasurementChain::IDEAL,
            )?;
            traces.push(("output", output));
            (variance(Regime::RedSidebandSingleTone, c, baths.n_m_T, n_c)?, c, rates.gamma_eff)
        }
        Regime::TwoToneBae => {
            let mech = BaeMechanics::resolve(&params, &drive, &baths)?;
            let grid = default_grid(Regime::TwoToneBae, &params, mech.gamma_eff)?;
            let (sx, sp) = spectrum_quadratures_bae(&grid, &params, &drive, &baths, mech)?;
            traces.push(("spectrum_x", sx));
            traces.push(("spectrum_p", sp));
            traces.push(("output", output_spectrum_bae(&grid, &params, &drive, &baths, mech, None)?));
            let c_eff = c * params.gamma / mech.gamma_eff;
            (variance_bae(c_eff, mech.n_m, n_c)?, c_eff, mech.gamma_eff)
        }
    };

    let mut files = Vec::new();
    for (name, t) in &traces {
        let path = out.join(format!("{name}.csv"));
        write_trace(&path, t, Some(&echo))?;
        files.push(path);
    }
    let integrated_first = area(&traces[0].1)?;
    let integrated_second = match traces.iter().find(|(n, _)| *n == "spectrum_p") {
        Some((_, t)) => Some(area(t)?),
        None => None,
    };
    let summary = VarianceSummary {
        config: echo,
        regime: drive.regime(),
        cooperativity: c,
        effective_cooperativity: c_eff,
        gamma_opt_hz: rad_to_hz(rates.gamma_opt),
        gamma_eff_hz: rad_to_hz(gamma_eff),
        intracavity_photons: rates.n_c,
        n_c_T: n_c,
        resolved_sidebands: checked.resolved_sidebands,
        warning: checked.warning,
        closed_form,
        integrated_first,
        integrated_second,
    };
    let path = out.join(VARIANCE_FILE);
    write_json(&path, &summary)?;
    files.push(path);
    Ok((summary, files))
}

/// Number of points written per sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SynthSummary {
    pub pump: Option<usize>,
    pub temperature: Option<usize>,
    pub power: Option<usize>,
}

/// Generates every sweep in the scenario into `out/<sweep>/`.
pub fn synth(config: &Path, out: &Path, seed: u64, force: bool) -> Result<SynthSummary> {
    let scenario: ScenarioConfig = load_config(config)?;
    synth_scenario(&scenario, out, seed, force)
}

pub fn synth_scenario(scenario: &ScenarioConfig, out: &Path, seed: u64, force: bool) -> Result<SynthSummary> {
    let pump = scenario.pump_sweep()?;
    let temperature = scenario.temperature_sweep()?;
    let power = scenario.power_sweep()?;
    if pump.is_none() && temperature.is_none() && power.is_none() {
        return Err(Error::Config("scenario defines no sweep".into()));
    }
    prepare_output(out, force)?;
    // stale points from an earlier, longer sweep would break reproducibility
    for name in [PUMP_DIR, TEMPERATURE_DIR, POWER_DIR] {
        let dir = out.join(name);
        if dir.is_dir() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let pool = thread_pool()?;
    let analyzer = Some(&scenario.analyzer);
    let mut summary = SynthSummary::default();
    pool.install(|| -> Result<()> {
        if let Some(s) = &pump {
            let d = synth_parallel(s, seed)?;
            write_dataset(&out.join(PUMP_DIR), &d.blind, analyzer, Some(&d.truth))?;
            summary.pump = Some(d.blind.traces.len());
        }
        if let Some(s) = &temperature {
            let d = synth_parallel(s, seed)?;
            write_dataset(&out.join(TEMPERATURE_DIR), &d.blind, analyzer, Some(&d.truth))?;
            summary.temperature = Some(d.blind.traces.len());
        }
        if let Some(s) = &power {
            let d = synth_parallel(s, seed)?;
            write_dataset(&out.join(POWER_DIR), &d.blind, analyzer, Some(&d.truth))?;
            summary.power = Some(d.blind.traces.len());
        }
        Ok(())
    })?;
    let pipeline = out.join(PIPELINE_FILE);
    match &scenario.pipeline {
        Some(p) => write_json(&pipeline, p)?,
        None if pipeline.exists() => fs::remove_file(&pipeline).map_err(|e| Error::io(&pipeline, e))?,
        None => {}
    }
    Ok(summary)
}

/// Headline constants in lab units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ReportSummary {
    /// `ℒ/2π`, Hz per power unit.
    pub damping_per_power_hz: f64,
    /// `𝒥/(2π)²`, Hz² per power unit.
    pub coupling_per_power_hz2: f64,
    pub flux_per_kelvin: f64,
    pub flux_per_cooperativity: f64,
    pub n_m_T0: f64,
    pub x2_ref: f64,
    pub evasion_demonstrated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub summary: ReportSummary,
    pub config: PipelineConfig,
    #[serde(flatten)]
    pub report: PipelineReport,
}

impl ReportFile {
    pub fn new(report: PipelineReport, config: PipelineConfig) -> Self {
        let c = &report.calibration;
        let summary = ReportSummary {
            damping_per_power_hz: c.damping_per_power_hz(),
            coupling_per_power_hz2: c.coupling_per_power / (TWO_PI * TWO_PI),
            flux_per_kelvin: c.flux_per_kelvin,
            flux_per_cooperativity: c.flux_per_cooperativity,
            n_m_T0: c.n_m_T0,
            x2_ref: c.x2_ref,
            evasion_demonstrated: report.evasion_report.evasion_demonstrated,
        };
        Self { summary, config, report }
    }
}

/// Pipeline settings: `config` if given, else `pipeline.json` in the
/// dataset directory, else the defaults.
pub fn pipeline_config(dataset: &Path, config: Option<&Path>) -> Result<PipelineConfig> {
    match config {
        Some(path) => load_config(path),
        None => {
            let path = dataset.join(PIPELINE_FILE);
            if path.exists() {
                read_json(&path)
            } else {
                Ok(PipelineConfig::default())
            }
        }
    }
}

/// Runs the calibration chain on a scenario directory and writes
/// `report.json` and `sweep.csv` to `out` (default `<dataset>/report`).
pub fn calibrate(dataset: &Path, config: Option<&Path>, out: Option<&Path>, force: bool) -> Result<ReportFile> {
    let cfg = pipeline_config(dataset, config)?;
    let pump = read_dataset(&dataset.join(PUMP_DIR))?;
    let temperature = read_dataset(&dataset.join(TEMPERATURE_DIR))?;
    let power = read_dataset(&dataset.join(POWER_DIR))?;
    let out = out.map_or_else(|| dataset.join("report"), Path::to_path_buf);
    prepare_output(&out, force)?;
    let report = thread_pool()?.install(|| run_pipeline_with(&pump, &temperature, &power, &cfg, &fit_traces_parallel))?;
    let file = ReportFile::new(report, cfg);
    write_json(&out.join(REPORT_FILE), &file)?;
    let rows = file.report.sweep_rows().into_iter().map(|r| {
        vec![r.cooperativity, r.linewidth_hz, r.flux, r.x2, r.model_bad, r.model_good, r.model_bae_p]
    });
    write_table(&out.join(SWEEP_TABLE), &SWEEP_COLUMNS, rows)?;
    Ok(file)
}

/// Runs the built-in checks.
pub fn selftest(mutation: Option<Mutation>) -> Result<Vec<Check>> {
    Ok(run_selftest(mutation)?)
}

/// One line per check: status, name, deviation against tolerance.
pub fn format_check(c: &Check) -> String {
    format!(
        "{} {:<22} deviation {:.3e} (tolerance {:.1e})  {}",
        if c.passed { "PASS" } else { "FAIL" },
        c.name,
        c.deviation,
        c.tolerance,
        c.description
    )
}
