use std::path::{Path, PathBuf};

use optomech_core::pipeline::PipelineError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// A file exists but its contents are unusable.
    #[error("{}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{} already exists; pass --force to overwrite", .0.display())]
    OutputExists(PathBuf),

    #[error(transparent)]
    Model(#[from] optomech_core::Error),

    #[error(transparent)]
    Pipeline(#[from] PipelineError),

    #[error("{0} self-test check(s) failed")]
    ChecksFailed(usize),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(path: &Path, message: impl ToString) -> Self {
        Error::Parse { path: path.to_path_buf(), message: message.to_string() }
    }

    /// Process exit code: 1 configuration, 2 runtime, 3 calibration stage.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Model(optomech_core::Error::Config(_)) => 1,
            Error::Pipeline(_) => 3,
            _ => 2,
        }
    }
}
