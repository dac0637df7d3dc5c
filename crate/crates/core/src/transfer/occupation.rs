//! Effective thermal occupation seen by the transferred excitation.

use super::pulse::PulseSchedule;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Noise entering the channel between the nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelNoiseModel {
    /// Flat spectrum `N(ω) = n_th`.
    White { n_th: f64 },
    /// Lorentzian dip of half-width `width` and depth `n_th - n0`, centred
    /// `detuning` away from the qubit frequency.
    Filtered { n_th: f64, n0: f64, width: f64, detuning: f64 },
}

impl ChannelNoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelNoiseModel::White { n_th } if n_th >= 0.0 => Ok(()),
            ChannelNoiseModel::Filtered { n_th, n0, width, detuning }
                if n_th >= 0.0 && n0 >= 0.0 && width > 0.0 && detuning.is_finite() =>
            {
                Ok(())
            }
            _ => Err(Error::Validation(format!("invalid channel noise model {self:?}"))),
        }
    }

    /// Spectrum relative to the qubit frequency.
    pub fn spectrum(&self, omega: f64) -> f64 {
        match *self {
            ChannelNoiseModel::White { n_th } => n_th,
            ChannelNoiseModel::Filtered { n_th, n0, width, detuning } => {
                let d = omega - detuning;
                n_th - (n_th - n0) * width * width / (d * d + width * width)
            }
        }
    }
}

/// `(2γ N0 + Γ_max N_th) / (2γ + Γ_max)`, the overlap of a one-sided
/// exponential pulse with a Lorentzian dip of half-width γ.
pub fn effective_occupation_closed(n_th: f64, n0: f64, gamma: f64, gamma_max: f64) -> f64 {
    (2.0 * gamma * n0 + gamma_max * n_th) / (2.0 * gamma + gamma_max)
}

/// Samples of the noise response `f(t) = √Γ1(t) 𝒢1(t_f, t)` on a grid.
fn response(schedule: &PulseSchedule, step: f64) -> (Vec<f64>, Vec<f64>) {
    let grid = schedule.fine_grid(step);
    let tf = schedule.window.1;
    let f = grid.iter().map(|&t| schedule.gamma1(t).sqrt() * schedule.envelope1(tf, t)).collect();
    (grid, f)
}

fn default_step(schedule: &PulseSchedule) -> f64 {
    1e-3 / schedule.gamma_max
}

/// `φ1(z) = (1 - e^{-z}) / z` and `φ2(z) = (z - 1 + e^{-z}) / z²`.
fn phi12(z: C64) -> (C64, C64) {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        let phi1 = 1.0 - z / 2.0 + z2 / 6.0 - z2 * z / 24.0;
        let phi2 = 0.5 - z / 6.0 + z2 / 24.0 - z2 * z / 120.0;
        (phi1, phi2)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (z - 1.0 + e) / (z * z))
    }
}

/// Final-qubit excitation `∫∫ f(t1) f(t2) ⟨B†(t1) B(t2)⟩` for the channel model.
///
/// White noise is δ-correlated, so it contributes `N_th ∫ f²`. The Lorentzian
/// dip has the correlation `-(N_th - N0)(γ̃/2) e^{-γ̃|τ|} e^{-iδτ}`; its double
/// integral is `2 Re ∫ f(t) I(t) dt` with `İ = f - (γ̃ + iδ) I`, which is
/// advanced exactly for piecewise-linear `f`.
pub fn effective_occupation_integral(schedule: &PulseSchedule, noise: &ChannelNoiseModel) -> Result<f64> {
    effective_occupation_integral_with_step(schedule, noise, default_step(schedule))
}

pub fn effective_occupation_integral_with_step(
    schedule: &PulseSchedule,
    noise: &ChannelNoiseModel,
    step: f64,
) -> Result<f64> {
    schedule.validate()?;
    noise.validate()?;
    if !(step > 0.0) {
        return Err(Error::Validation("integration step must be positive".into()));
    }
    let (grid, f) = response(schedule, step);
    let norm: f64 = grid.windows(2).zip(f.windows(2)).map(|(t, y)| (t[1] - t[0]) * trapezoid_sq(y[0], y[1])).sum();
    let (n_th, dip) = match *noise {
        ChannelNoiseModel::White { n_th } => (n_th, None),
        ChannelNoiseModel::Filtered { n_th, n0, width, detuning } => (n_th, Some((n_th - n0, width, detuning))),
    };
    let mut total = n_th * norm;
    if let Some((depth, width, detuning)) = dip {
        let lambda = C64::new(width, detuning);
        let mut i_acc = C64::new(0.0, 0.0);
        let mut overlap = 0.0;
        for k in 0..grid.len() - 1 {
            let h = grid[k + 1] - grid[k];
            let (p1, p2) = phi12(lambda * h);
            let i_next = (-lambda * h).exp() * i_acc + h * (f[k] * (p1 - p2) + f[k + 1] * p2);
            overlap += 0.5 * h * (f[k] * i_acc.re + f[k + 1] * i_next.re);
            i_acc = i_next;
        }
        total -= depth * width * overlap;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature { a: schedule.window.0, b: schedule.window.1, error: f64::INFINITY });
    }
    Ok(total)
}

/// Exact `∫_0^1 (a(1-s) + b s)² ds`.
fn trapezoid_sq(a: f64, b: f64) -> f64 {
    (a * a + a * b + b * b) / 3.0
}

/// `F(ω) = (2π)^{-1/2} ∫ e^{iωt} √Γ1(t) 𝒢1(t_f, t) dt`, with `f` taken piecewise
/// linear on a fine grid and each segment integrated exactly.
pub fn pulse_spectrum_f(schedule: &PulseSchedule, omega_grid: &[f64]) -> Result<Vec<C64>> {
    schedule.validate()?;
    let (grid, f) = response(schedule, default_step(schedule));
    let norm = (2.0 * std::f64::consts::PI).sqrt().recip();
    Ok(omega_grid
        .par_iter()
        .map(|&w| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..grid.len() - 1 {
                if f[k] == 0.0 && f[k + 1] == 0.0 {
                    continue;
                }
                let h = grid[k + 1] - grid[k];
                // with t = t_{k+1} - u the phase is e^{iωt_{k+1}} e^{-iωu}
                let (p1, p2) = phi12(C64::new(0.0, w * h));
                let ez = C64::new(0.0, w * grid[k + 1]).exp();
                acc += ez * h * (f[k + 1] * p2 + f[k] * (p1 - p2));
            }
            acc * norm
        })
        .collect())
}

/// Fraction of `∫|F|²` inside `[lo, hi]` on a sampled spectrum (trapezoid).
pub fn spectral_fraction(omega_grid: &[f64], f: &[C64], lo: f64, hi: f64) -> f64 {
    let mut inside = 0.0;
    let mut total = 0.0;
    for k in 0..omega_grid.len().saturating_sub(1) {
        let piece = 0.5 * (omega_grid[k + 1] - omega_grid[k]) * (f[k].norm_sqr() + f[k + 1].norm_sqr());
        total += piece;
        let mid = 0.5 * (omega_grid[k] + omega_grid[k + 1]);
        if mid >= lo && mid <= hi {
            inside += piece;
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}
