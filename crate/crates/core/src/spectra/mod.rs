//! Spectral densities, variances and backaction occupancies for the three
//! regimes, plus numerical integration of sampled spectra.

mod integrate;
mod model;
mod trace;
mod variance;

pub use integrate::{integrate_component, integrate_samples, integrate_spectrum, IntegralEstimate, TailModel};
pub use model::{
    bae_output_gain, default_grid, lorentzian_pair, output_spectrum_bae, spectrum_from_response,
    spectrum_quadratures_bae, spectrum_x_bad_cavity, spectrum_x_good_cavity, BaeMechanics, LorentzianPair,
};
pub use trace::{Component, Components, Frame, SpectrumTrace, TraceMeta, COMPONENT_SUM_TOL};
pub use variance::{
    backaction_occupancy, bae_quadrature_backaction, output_flux_bae, variance, variance_bad_cavity, variance_bae,
    variance_good_cavity, VarianceParts, VarianceReport,
};
