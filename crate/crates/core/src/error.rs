use alloc::string::String;
use alloc::vec::Vec;

use crate::params::{ConfigIssue, Regime};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {}", join_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("operation requires the {expected:?} regime, got {actual:?}")]
    WrongRegime { expected: Regime, actual: Regime },

    #[error("unknown regime '{0}'")]
    UnknownRegime(String),

    #[error("singular linear system at omega = {omega} rad/s")]
    Singular { omega: f64 },

    #[error("integration band [{lo}, {hi}] Hz lies outside the grid [{grid_lo}, {grid_hi}] Hz")]
    BandOutsideGrid { lo: f64, hi: f64, grid_lo: f64, grid_hi: f64 },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("fit did not converge after {iterations} iterations (weighted residual {residual:.3e})")]
    FitNotConverged { iterations: usize, residual: f64 },

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("calibration failed: {0}")]
    Calibration(String),
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    let mut out = String::new();
    for (k, issue) in issues.iter().enumerate() {
        if k > 0 {
            out.push_str("; ");
        }
        out.push_str(&alloc::format!("{issue}"));
    }
    out
}
