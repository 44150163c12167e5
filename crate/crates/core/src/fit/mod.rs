//! Least-squares fits: a Lorentzian peak on a flat floor and straight lines.

mod linear;
mod lorentzian;

pub use linear::{fit_linear, fit_linear_through_origin, LinearFit, LinearFitWarning};
pub use lorentzian::{
    fit_lorentzian, fit_lorentzian_with, lorentzian_gradient, lorentzian_model, FitOptions, LorentzianFit,
    LorentzianParams,
};
