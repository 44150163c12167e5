//! Frequency-domain model of a mechanical oscillator read out through a
//! microwave cavity, in three pump regimes:
//!
//! * single tone, unresolved sidebands (`κ ≫ ω_m`), zero detuning;
//! * single tone on the red sideband (`κ ≪ ω_m`), i.e. sideband cooling;
//! * two equal tones at `ω_c ± ω_m`, a single-quadrature backaction-evading
//!   (BAE) measurement, optionally with an auxiliary cooling tone.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration
//! records and the command line live in the `optomech` crate.
//!
//! Conventions used throughout:
//!
//! * every rate and frequency is stored in angular units (rad/s); `*_hz`
//!   accessors and constructors convert at the boundary;
//! * spectral densities `S[ω]` are in quanta per unit angular frequency, so
//!   `⟨z²⟩ = (1/2π)∫S[ω]dω = ∫S df`; traces are sampled on a grid in Hz and
//!   integrate directly to quanta;
//! * Fourier convention `d/dt → −iω`, susceptibilities `χ⁻¹ = Γ/2 − iω`;
//! * single-tone regimes keep the mechanics in the lab frame and the cavity in
//!   the frame of the pump; the BAE regime is entirely in rotating quadratures.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod calibrate;
pub mod constants;
pub mod error;
pub mod fit;
pub mod grid;
pub mod linalg;
pub mod params;
pub mod pipeline;
pub mod response;
pub mod selftest;
pub mod spectra;
pub mod synth;

pub use error::{Error, Result};
pub use params::{
    bose_occupation, cavity_thermal_occupation, cooperativity, enhanced_coupling,
    optical_damping, validate_params, BathState, CheckedConfig, ConfigIssue, ConfigWarning,
    CoolingTone, DerivedRates, DriveScheme, Regime, SystemParams,
};
pub use spectra::{Frame, SpectrumTrace, VarianceReport};
