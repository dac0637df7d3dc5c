//! Single-mode optomechanical cooling and the waveguide noise filter.

use super::{filtered_noise_spectrum, CouplingSpec, LinearNetwork, ModeSpec, NoiseSpectrum, PortSpec};
use crate::error::Result;
use num_complex::Complex64;

/// Parameters of the beam-splitter filter closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    /// Waveguide coupling rate γ.
    pub gamma: f64,
    /// Optically induced damping `γ_op = 2|gα|²/κ`.
    pub gamma_op: f64,
    pub kappa: f64,
    pub omega_m: f64,
    pub n_th: f64,
}

/// Reflected waveguide occupation of the beam-splitter filter:
///
/// `N_F = N_th [1 - 4κ²γ_op γ / (κ²(γ_op+γ)² + (γ-2κ)²Δ² + 4Δ⁴)]`, `Δ = ω - ω_m`.
pub fn closed_form_filter(p: &FilterParams, omega: f64) -> f64 {
    let d2 = (omega - p.omega_m).powi(2);
    let k2 = p.kappa * p.kappa;
    let den = k2 * (p.gamma_op + p.gamma).powi(2) + (p.gamma - 2.0 * p.kappa).powi(2) * d2 + 4.0 * d2 * d2;
    p.n_th * (1.0 - 4.0 * k2 * p.gamma_op * p.gamma / den)
}

/// Coupling `|gα|` for which `γ_op = γ + γ0` in the beam-splitter model.
pub fn impedance_matched_coupling(gamma: f64, gamma0: f64, kappa: f64) -> f64 {
    ((gamma + gamma0) * kappa / 2.0).sqrt()
}

/// Coupling for which the net optical damping including the Stokes sideband,
/// `|gα|² (2/κ - 2κ/(κ² + 4ω_m²))`, equals `γ + γ0` (red-sideband drive).
pub fn impedance_matched_coupling_full(gamma: f64, gamma0: f64, kappa: f64, omega_m: f64) -> f64 {
    let net = 2.0 / kappa - 2.0 * kappa / (kappa * kappa + 4.0 * omega_m * omega_m);
    ((gamma + gamma0) / net).sqrt()
}

/// Weak-coupling sideband-cooling spectrum of the mechanical mode,
/// `(γ0+γ_op) N̄ / ((ω-ω_m)² + (γ0+γ_op)²/4)` with
/// `N̄ = N_th γ0/(γ0+γ_op) + κ²/(4ω_m²)`.
pub fn single_mode_cooling_spectrum(omega: f64, omega_m: f64, gamma0: f64, gamma_op: f64, kappa: f64, n_th: f64) -> f64 {
    let width = gamma0 + gamma_op;
    let n_bar = n_th * gamma0 / width + kappa * kappa / (4.0 * omega_m * omega_m);
    width * n_bar / ((omega - omega_m).powi(2) + width * width / 4.0)
}

/// Driven optical cavity coupled to a mechanical mode that is side-coupled to
/// a thermal waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct OptomechanicalFilter {
    pub omega_m: f64,
    /// Waveguide coupling γ.
    pub gamma: f64,
    /// Intrinsic mechanical damping γ0.
    pub gamma0: f64,
    /// Optical amplitude decay rate (port rate 2κ).
    pub kappa: f64,
    pub g_alpha: Complex64,
    /// Laser detuning δ; the red sideband is `δ = -ω_m`.
    pub delta: f64,
    pub n_th: f64,
    /// Beam-splitter model if true, full linearized coupling otherwise.
    pub rotating_wave: bool,
}

impl OptomechanicalFilter {
    /// Red-sideband filter at the beam-splitter impedance-matched coupling.
    pub fn matched(omega_m: f64, gamma: f64, gamma0: f64, kappa: f64, n_th: f64) -> Self {
        OptomechanicalFilter {
            omega_m,
            gamma,
            gamma0,
            kappa,
            g_alpha: Complex64::new(impedance_matched_coupling(gamma, gamma0, kappa), 0.0),
            delta: -omega_m,
            n_th,
            rotating_wave: true,
        }
    }

    /// Reference operating point in units of γ: `ω_m = 1200`, `κ = 300`, `γ0 = 0`, `N_th = 40`.
    pub fn reference() -> Self {
        Self::matched(1200.0, 1.0, 0.0, 300.0, 40.0)
    }

    pub fn gamma_op(&self) -> f64 {
        2.0 * self.g_alpha.norm_sqr() / self.kappa
    }

    pub fn network(&self) -> Result<LinearNetwork> {
        let coupling = if self.rotating_wave {
            CouplingSpec::beam_splitter("a", "b", self.g_alpha)
        } else {
            CouplingSpec::full("a", "b", self.g_alpha)
        };
        LinearNetwork::new(
            vec![
                ModeSpec::optical("a", self.delta),
                ModeSpec::mechanical("b", self.omega_m, self.gamma0, self.n_th),
            ],
            vec![coupling],
            vec![PortSpec::new("a", 2.0 * self.kappa, 0.0), PortSpec::new("b", self.gamma, self.n_th)],
        )
    }

    pub fn closed_form_params(&self) -> FilterParams {
        FilterParams { gamma: self.gamma, gamma_op: self.gamma_op(), kappa: self.kappa, omega_m: self.omega_m, n_th: self.n_th }
    }

    /// 4001 points spanning `ω_m ± 10γ`.
    pub fn default_grid(&self) -> Vec<f64> {
        NoiseSpectrum::uniform_grid(self.omega_m - 10.0 * self.gamma, self.omega_m + 10.0 * self.gamma, 4001)
    }

    pub fn spectrum(&self, grid: &[f64]) -> Result<NoiseSpectrum> {
        filtered_noise_spectrum(&self.network()?, grid)
    }

    /// Floor from intrinsic loss, `4 N_th γ γ0 / (γ_op + γ + γ0)²`.
    pub fn intrinsic_floor_estimate(&self) -> f64 {
        4.0 * self.n_th * self.gamma * self.gamma0 / (self.gamma_op() + self.gamma + self.gamma0).powi(2)
    }

    /// Floor from counter-rotating terms, `|gα|² / (4ω_m²)`.
    pub fn counter_rotating_floor_estimate(&self) -> f64 {
        self.g_alpha.norm_sqr() / (4.0 * self.omega_m * self.omega_m)
    }

    /// Vacuum noise scattered in through the Stokes sideband at impedance
    /// matching, `κ²/(4ω_m²)`. This is what the full model shows; the
    /// `|gα|²/(4ω_m²)` estimate above is smaller by `2κ/γ`.
    pub fn sideband_floor_estimate(&self) -> f64 {
        self.kappa * self.kappa / (4.0 * self.omega_m * self.omega_m)
    }

    /// Second-order estimate of the dip-center shift, `-|gα|²/(2ω_m)`.
    pub fn dip_shift_estimate(&self) -> f64 {
        -self.g_alpha.norm_sqr() / (2.0 * self.omega_m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn matched_params() -> FilterParams {
        FilterParams { gamma: 1.0, gamma_op: 1.0, kappa: 300.0, omega_m: 1200.0, n_th: 40.0 }
    }

    #[test]
    fn closed_form_cancels_on_resonance_when_matched() {
        assert!(closed_form_filter(&matched_params(), 1200.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_recovers_thermal_level_far_away() {
        let p = matched_params();
        assert_relative_eq!(closed_form_filter(&p, 1200.0 + 1e6), 40.0, max_relative = 1e-9);
        assert_relative_eq!(closed_form_filter(&p, 1200.0 - 1e6), 40.0, max_relative = 1e-9);
    }

    #[test]
    fn closed_form_half_depth_matches_root_of_denominator() {
        // N_F = N_th/2 where the denominator equals 8κ²γ_opγ; solve the quadratic in Δ²
        let p = matched_params();
        let (k, g) = (p.kappa, p.gamma);
        let a = 4.0;
        let b = (g - 2.0 * k).powi(2);
        let c = k * k * (2.0 * g).powi(2) - 8.0 * k * k * g * g;
        let d2 = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        let w = 1200.0 + d2.sqrt();
        assert_relative_eq!(closed_form_filter(&p, w), 20.0, max_relative = 1e-9);
    }

    #[test]
    fn matched_coupling_gives_gamma_op_equal_gamma() {
        let f = OptomechanicalFilter::matched(1200.0, 1.0, 0.3, 300.0, 40.0);
        assert_relative_eq!(f.gamma_op(), 1.3, max_relative = 1e-14);
    }

    #[test]
    fn full_matching_balances_stokes_damping() {
        let (g, g0, k, w) = (1.0, 0.0, 300.0, 1200.0);
        let c = impedance_matched_coupling_full(g, g0, k, w);
        let s = |x: f64| 2.0 * k / (k * k + (x - w).powi(2));
        assert_relative_eq!(c * c * (s(w) - s(-w)), g + g0, max_relative = 1e-13);
        assert!(c > impedance_matched_coupling(g, g0, k));
    }

    #[test]
    fn stokes_vacuum_sets_the_full_model_floor() {
        let base = OptomechanicalFilter::reference();
        let ga = impedance_matched_coupling_full(base.gamma, base.gamma0, base.kappa, base.omega_m);
        let f = OptomechanicalFilter { g_alpha: Complex64::new(ga, 0.0), rotating_wave: false, ..base };
        let grid = NoiseSpectrum::uniform_grid(f.omega_m - 0.2, f.omega_m + 0.1, 3001);
        let (_, floor) = f.spectrum(&grid).unwrap().minimum().unwrap();
        assert_relative_eq!(floor, f.sideband_floor_estimate(), max_relative = 1e-2);
    }

    #[test]
    fn uncooled_single_mode_spectrum_peak() {
        // γ_op → 0 with κ²/(4ω_m²) negligible
        let v = single_mode_cooling_spectrum(10.0, 10.0, 0.1, 0.0, 1e-9, 2.0);
        assert_relative_eq!(v, 4.0 * 2.0 / 0.1, max_relative = 1e-12);
    }
}
