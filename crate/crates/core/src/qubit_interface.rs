//! Raman-assisted coupling of an NV spin to a mechanical mode.
//!
//! Two lasers with Rabi frequencies `Ω0`, `Ω1` drive the `|0⟩ → |e⟩` and
//! `|1⟩ → |e⟩` transitions at detunings `Δ0,1 = Δ ± ω_m/2`. Eliminating the
//! excited state gives
//!
//! ```text
//! λ_eff = λ Ω0 Ω1 / (Δ² - ω_m²/4)        Γ_eff^(j) = Γ_e Ω_j² / Δ_j²
//! ```
//!
//! `λ_eff` is negative for `|Δ| < ω_m/2`; at `Δ = 0` its magnitude is
//! `4 λ Ω0 Ω1 / ω_m²`.

use crate::error::{Error, Result};

/// Detuning-to-Rabi ratio below which the elimination is flagged.
pub const ADIABATIC_RATIO_WARNING: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams {
    /// Bare deformation-potential coupling λ.
    pub lambda: f64,
    pub omega_m: f64,
    pub omega0: f64,
    pub omega1: f64,
    /// Mean laser detuning Δ.
    pub delta: f64,
    /// Excited-state decay rate Γ_e.
    pub gamma_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamanCoupling {
    /// Signed effective coupling.
    pub lambda_eff: f64,
    pub gamma_eff0: f64,
    pub gamma_eff1: f64,
    /// `(Γ_eff^(0) + Γ_eff^(1)) / 2`.
    pub gamma_eff_mean: f64,
    /// `|λ_eff| / Γ̄_eff`.
    pub figure_of_merit: f64,
    pub warnings: Vec<String>,
}

impl RamanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_e > 0.0) {
            return Err(Error::Validation("excited-state decay must be positive".into()));
        }
        let all = [self.lambda, self.omega_m, self.omega0, self.omega1, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("Raman parameters must be finite".into()));
        }
        Ok(())
    }

    /// `(Δ0, Δ1) = (Δ + ω_m/2, Δ - ω_m/2)`.
    pub fn level_detunings(&self) -> (f64, f64) {
        (self.delta + 0.5 * self.omega_m, self.delta - 0.5 * self.omega_m)
    }
}

pub fn effective_spin_phonon(p: &RamanParams) -> Result<RamanCoupling> {
    p.validate()?;
    let (d0, d1) = p.level_detunings();
    if d0 == 0.0 || d1 == 0.0 {
        return Err(Error::Resonance(format!("laser on Raman resonance Δ = {:e} = ±ω_m/2", p.delta)));
    }
    let lambda_eff = p.lambda * p.omega0 * p.omega1 / (d0 * d1);
    let gamma_eff0 = p.gamma_e * p.omega0 * p.omega0 / (d0 * d0);
    let gamma_eff1 = p.gamma_e * p.omega1 * p.omega1 / (d1 * d1);
    let mean = 0.5 * (gamma_eff0 + gamma_eff1);
    let figure_of_merit = if mean > 0.0 { lambda_eff.abs() / mean } else { 0.0 };

    let mut warnings = Vec::new();
    for (j, (d, om)) in [(d0, p.omega0), (d1, p.omega1)].into_iter().enumerate() {
        if om != 0.0 && d.abs() / om.abs() < ADIABATIC_RATIO_WARNING {
            warnings.push(format!("|Δ{j}| / Ω{j} = {:.3} is below {ADIABATIC_RATIO_WARNING}", d.abs() / om.abs()));
        }
    }
    Ok(RamanCoupling { lambda_eff, gamma_eff0, gamma_eff1, gamma_eff_mean: mean, figure_of_merit, warnings })
}

/// `|λ_eff| / Γ̄_eff` across mean detunings.
pub fn figure_of_merit_sweep(p: &RamanParams, delta_grid: &[f64]) -> Result<Vec<f64>> {
    delta_grid.iter().map(|&delta| effective_spin_phonon(&RamanParams { delta, ..*p }).map(|c| c.figure_of_merit)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> RamanParams {
        RamanParams { lambda: 0.02, omega_m: 10.0, omega0: 0.4, omega1: 0.4, delta: 0.0, gamma_e: 0.1 }
    }

    #[test]
    fn zero_detuning_values() {
        let c = effective_spin_phonon(&base()).unwrap();
        assert_relative_eq!(c.lambda_eff, -4.0 * 0.02 * 0.16 / 100.0, max_relative = 1e-14);
        assert_relative_eq!(c.figure_of_merit, 0.02 / 0.1, max_relative = 1e-14);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn one_leg_off_kills_coupling() {
        let c = effective_spin_phonon(&RamanParams { omega1: 0.0, ..base() }).unwrap();
        assert_eq!(c.lambda_eff, 0.0);
        assert_eq!(c.gamma_eff1, 0.0);
    }

    #[test]
    fn raman_resonance_is_an_error() {
        let r = effective_spin_phonon(&RamanParams { delta: 5.0, ..base() });
        assert!(matches!(r, Err(Error::Resonance(_))));
    }

    #[test]
    fn decay_scales_quadratically() {
        let a = effective_spin_phonon(&base()).unwrap();
        let b = effective_spin_phonon(&RamanParams { omega0: 0.8, ..base() }).unwrap();
        assert_relative_eq!(b.gamma_eff0, 4.0 * a.gamma_eff0, max_relative = 1e-14);
        assert_relative_eq!(b.gamma_eff1, a.gamma_eff1, max_relative = 1e-14);
    }

    #[test]
    fn sweep_peaks_at_zero_detuning() {
        let grid: Vec<f64> = (-40..=40).map(|k| 0.1 * k as f64 + 0.013).collect();
        let f = figure_of_merit_sweep(&base(), &grid).unwrap();
        let (best, _) = f.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let nearest = grid.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap().0;
        assert_eq!(best, nearest);
        // far detuned the ratio returns toward λ/Γ_e from below
        let far = figure_of_merit_sweep(&base(), &[1e4]).unwrap()[0];
        assert!(far < 0.2 && far > 0.2 * (1.0 - 1e-6));
    }

    #[test]
    fn close_detuning_is_flagged() {
        let c = effective_spin_phonon(&RamanParams { delta: 4.0, omega1: 3.0, ..base() }).unwrap();
        assert!(!c.warnings.is_empty());
    }
}
