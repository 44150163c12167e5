//! Physical constants (CODATA 2018 exact / recommended values).

use core::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact since the 2019 SI redefinition).
pub const K_B: f64 = 1.380_649e-23;

pub const TWO_PI: f64 = 2.0 * PI;

/// Converts an ordinary frequency in Hz to rad/s.
#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    TWO_PI * f_hz
}

/// Converts an angular frequency in rad/s to Hz.
#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}
