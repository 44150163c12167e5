//! Trace CSV files with JSON sidecars, and sweep dataset directories.
//!
//! Values are written with 17 significant digits, which is enough to read
//! every `f64` back bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use optomech_core::constants::{hz_to_rad, rad_to_hz, TWO_PI};
use optomech_core::spectra::{Components, TraceMeta};
use optomech_core::synth::{Analyzer, BlindDataset, DatasetTruth, MeasurementChain, PointTruth, SweepKind};
use optomech_core::{Frame, SpectrumTrace};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 7] = ["freq_hz", "total", "vacuum", "thermal", "qba", "classical", "floor"];
pub const DATASET_FILE: &str = "dataset.json";
pub const TRUTH_FILE: &str = "truth.json";

/// Formats `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Metadata written next to a trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSidecar {
    pub frame: Frame,
    pub points: usize,
    /// Whether the CSV carries the component columns.
    pub components: bool,
    pub meta: TraceMeta,
    /// Model configuration that produced the trace, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ModelConfig>,
}

/// Sidecar path for a trace CSV: same stem, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

/// Writes `trace` to `csv` and its sidecar next to it.
pub fn write_trace(csv: &Path, trace: &SpectrumTrace, config: Option<&ModelConfig>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(csv)?);
    let io = |e: csv::Error| Error::parse(csv, e);
    w.write_record(TRACE_HEADER).map_err(io)?;
    for k in 0..trace.len() {
        let mut row = vec![fmt_f64(trace.freq_hz[k]), fmt_f64(trace.total[k])];
        match &trace.components {
            Some(c) => row.extend([&c.vacuum, &c.thermal, &c.qba, &c.classical, &c.floor].map(|v| fmt_f64(v[k]))),
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(csv, e))?;
    let sidecar = TraceSidecar {
        frame: trace.frame,
        points: trace.len(),
        components: trace.components.is_some(),
        meta: trace.meta.clone(),
        config: config.cloned(),
    };
    write_json(&sidecar_path(csv), &sidecar)
}

/// Reads a trace and its sidecar. Any malformed content is reported against
/// the file it came from.
pub fn read_trace(csv: &Path) -> Result<(SpectrumTrace, TraceSidecar)> {
    let sidecar: TraceSidecar = read_json(&sidecar_path(csv))?;
    let file = fs::File::open(csv).map_err(|e| Error::io(csv, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = r.headers().map_err(|e| Error::parse(csv, e))?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::parse(csv, format!("expected header {}", TRACE_HEADER.join(","))));
    }
    let mut cols: [Vec<f64>; 7] = Default::default();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(csv, e))?;
        let line = k + 2;
        let width = if sidecar.components { 7 } else { 2 };
        for (j, field) in rec.iter().enumerate() {
            if j >= width {
                if !field.is_empty() {
                    return Err(Error::parse(csv, format!("line {line}: unexpected {} value", TRACE_HEADER[j])));
                }
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(csv, format!("line {line}: bad {} value '{field}'", TRACE_HEADER[j])))?;
            cols[j].push(v);
        }
    }
    if cols[0].len() != sidecar.points {
        return Err(Error::parse(csv, format!("{} rows, sidecar says {}", cols[0].len(), sidecar.points)));
    }
    let [freq_hz, total, vacuum, thermal, qba, classical, floor] = cols;
    let components = sidecar.components.then_some(Components { vacuum, thermal, qba, classical, floor });
    let trace = SpectrumTrace { freq_hz, total, components, frame: sidecar.frame, meta: sidecar.meta.clone() };
    trace.validate().map_err(|e| Error::parse(csv, e))?;
    Ok((trace, sidecar))
}

/// `dataset.json`: everything about a sweep the analysis may see.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct DatasetHeader {
    pub kind: SweepKind,
    pub seed: u64,
    pub axis: Vec<f64>,
    pub device: ModelConfig,
    #[serde(default)]
    pub base_temperature_K: Option<f64>,
    #[serde(default)]
    pub analyzer: Option<Analyzer>,
}

/// One point of `truth.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct PointTruthRecord {
    pub axis: f64,
    pub cooperativity: f64,
    pub linewidth_hz: f64,
    pub temperature_K: f64,
    pub n_m_T: f64,
    pub n_c_T: f64,
    pub x2: f64,
    pub flux: f64,
    pub detected_area: f64,
    pub center_hz: f64,
}

/// `truth.json`: the hidden values behind a synthetic sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    /// `𝒥/(2π)²` in Hz² per power unit.
    pub coupling_per_power_hz2: Option<f64>,
    pub chain: MeasurementChain,
    pub points: Vec<PointTruthRecord>,
}

impl From<&DatasetTruth> for TruthRecord {
    fn from(t: &DatasetTruth) -> Self {
        Self {
            coupling_per_power_hz2: t.coupling_per_power.map(|j| j / (TWO_PI * TWO_PI)),
            chain: t.chain,
            points: t
                .points
                .iter()
                .map(|p| PointTruthRecord {
                    axis: p.axis,
                    cooperativity: p.cooperativity,
                    linewidth_hz: rad_to_hz(p.gamma_eff),
                    temperature_K: p.temperature_k,
                    n_m_T: p.n_m_T,
                    n_c_T: p.n_c_T,
                    x2: p.x2,
                    flux: p.flux,
                    detected_area: p.detected_area,
                    center_hz: p.center_hz,
                })
                .collect(),
        }
    }
}

impl From<&TruthRecord> for DatasetTruth {
    fn from(t: &TruthRecord) -> Self {
        Self {
            coupling_per_power: t.coupling_per_power_hz2.map(|j| j * TWO_PI * TWO_PI),
            chain: t.chain,
            points: t
                .points
                .iter()
                .map(|p| PointTruth {
                    axis: p.axis,
                    cooperativity: p.cooperativity,
                    gamma_eff: hz_to_rad(p.linewidth_hz),
                    temperature_k: p.temperature_K,
                    n_m_T: p.n_m_T,
                    n_c_T: p.n_c_T,
                    x2: p.x2,
                    flux: p.flux,
                    detected_area: p.detected_area,
                    center_hz: p.center_hz,
                })
                .collect(),
        }
    }
}

pub fn point_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("point_{k}.csv"))
}

/// Writes a dataset directory; `truth` goes to `truth.json` when given.
pub fn write_dataset(
    dir: &Path,
    blind: &BlindDataset,
    analyzer: Option<&Analyzer>,
    truth: Option<&DatasetTruth>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = DatasetHeader {
        kind: blind.kind,
        seed: blind.seed,
        axis: blind.axis.clone(),
        device: ModelConfig::device(&blind.params),
        base_temperature_K: blind.base_temperature_k,
        analyzer: analyzer.copied(),
    };
    write_json(&dir.join(DATASET_FILE), &header)?;
    for (k, t) in blind.traces.iter().enumerate() {
        write_trace(&point_path(dir, k), t, None)?;
    }
    if let Some(t) = truth {
        write_json(&dir.join(TRUTH_FILE), &TruthRecord::from(t))?;
    }
    Ok(())
}

/// Reads the blind view of a dataset directory.
pub fn read_dataset(dir: &Path) -> Result<BlindDataset> {
    let path = dir.join(DATASET_FILE);
    let header: DatasetHeader = read_json(&path)?;
    let params = header.device.params().map_err(|e| Error::parse(&path, e))?;
    let traces = (0..header.axis.len())
        .map(|k| read_trace(&point_path(dir, k)).map(|(t, _)| t))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlindDataset {
        kind: header.kind,
        axis: header.axis,
        traces,
        params,
        base_temperature_k: header.base_temperature_K,
        seed: header.seed,
    })
}

pub fn read_truth(dir: &Path) -> Result<DatasetTruth> {
    let record: TruthRecord = read_json(&dir.join(TRUTH_FILE))?;
    Ok(DatasetTruth::from(&record))
}

/// Creates `dir` if needed. An existing non-empty directory is an error
/// unless `force` is set.
pub fn prepare_output(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        if entries.next().is_some() && !force {
            return Err(Error::OutputExists(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `rows` as CSV under `header`, each value with 17 significant digits.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| Error::parse(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v))).map_err(|e| Error::parse(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
