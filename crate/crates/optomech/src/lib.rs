//! File formats, configuration records, parallel drivers and the command line
//! front end for the `optomech-core` model.
//!
//! Every frequency in a file is in Hz; the model works in rad/s.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;

pub use error::{Error, Result};
pub use optomech_core as model;
