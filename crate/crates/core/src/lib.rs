//! Simulation of thermal-noise filtering, quantum state transfer and
//! non-reciprocal routing in linear phonon networks with optomechanical
//! control elements.
//!
//! All rates and frequencies are angular and unit-agnostic: any consistent
//! unit works (the examples mostly measure everything in units of a
//! reference rate such as the waveguide coupling γ).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascaded_me;
pub mod error;
pub mod linear_network;
pub mod nonreciprocal;
pub mod ode;
pub mod quad;
pub mod qubit_interface;
pub mod transfer;
pub mod waveguide;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Converts an ordinary frequency in Hz to an angular frequency.
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Converts an angular frequency to an ordinary frequency in Hz.
pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * std::f64::consts::PI)
}
