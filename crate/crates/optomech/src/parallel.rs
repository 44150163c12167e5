//! Thread pool sizing and the parallel maps over traces and sweep points.

use optomech_core::fit::{fit_lorentzian, LorentzianFit};
use optomech_core::synth::{assemble, Sweep, SweepDataset};
use optomech_core::SpectrumTrace;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "OPTOMECH_THREADS";

/// Parses a thread cap; `None` or `0` leaves the choice to rayon.
pub fn parse_threads(value: Option<&str>) -> Result<usize> {
    match value {
        None => Ok(0),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{s}'"))),
    }
}

/// Pool capped by `OPTOMECH_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let cap = parse_threads(std::env::var(THREADS_ENV).ok().as_deref())?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cap)
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))
}

/// Fits every trace; results are in input order.
pub fn fit_traces_parallel(traces: &[SpectrumTrace]) -> Vec<optomech_core::Result<LorentzianFit>> {
    traces.par_iter().map(fit_lorentzian).collect()
}

/// Generates sweep points in parallel. Each point has its own random
/// stream, so the result equals the sequential one bit for bit.
pub fn synth_parallel<S: Sweep>(sweep: &S, seed: u64) -> Result<SweepDataset> {
    sweep.validate()?;
    let points = (0..sweep.axis().len())
        .into_par_iter()
        .map(|k| sweep.point(k, seed))
        .collect::<optomech_core::Result<Vec<_>>>()?;
    Ok(assemble(sweep, points, seed))
}
