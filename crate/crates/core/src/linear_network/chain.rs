//! Finite chain of tunnel-coupled resonators cooled through its first site.

use super::{CouplingSpec, LinearNetwork, ModeSpec, PortSpec};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `N` resonators at `ω_m` with nearest-neighbour hopping `-K(b_i b_j† + h.c.)`;
/// the optical mode couples to `b1` in the beam-splitter form.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingChain {
    pub n_sites: usize,
    pub omega_m: f64,
    pub coupling_k: f64,
    pub gamma0: f64,
    pub kappa: f64,
    pub g_alpha: Complex64,
    pub delta: f64,
    pub n_th: f64,
}

impl CoolingChain {
    /// Reference chain in units of K (`γ0 = 0.05`, `κ = 0.5`, `δ = -ω_m`).
    pub fn reference(n_sites: usize, omega_m: f64, g_alpha: f64) -> Self {
        CoolingChain {
            n_sites,
            omega_m,
            coupling_k: 1.0,
            gamma0: 0.05,
            kappa: 0.5,
            g_alpha: Complex64::new(g_alpha, 0.0),
            delta: -omega_m,
            n_th: 1.0,
        }
    }

    /// Label of site `j` (1-based).
    pub fn site_label(j: usize) -> String {
        format!("b{j}")
    }

    pub fn network(&self) -> Result<LinearNetwork> {
        if self.n_sites < 1 {
            return Err(Error::Validation("chain needs at least one site".into()));
        }
        let mut modes = vec![ModeSpec::optical("a", self.delta)];
        for j in 1..=self.n_sites {
            modes.push(ModeSpec::mechanical(Self::site_label(j), self.omega_m, self.gamma0, self.n_th));
        }
        let mut couplings = vec![CouplingSpec::beam_splitter("a", "b1", self.g_alpha)];
        for j in 1..self.n_sites {
            couplings.push(CouplingSpec::beam_splitter(
                Self::site_label(j + 1),
                Self::site_label(j),
                Complex64::new(-self.coupling_k, 0.0),
            ));
        }
        LinearNetwork::new(modes, couplings, vec![PortSpec::new("a", 2.0 * self.kappa, 0.0)])
    }

    /// Normal-mode frequencies of the uncooled chain, `n = 1..=N`.
    pub fn mode_frequencies(&self) -> Vec<f64> {
        (1..=self.n_sites).map(|n| chain_mode_frequency(n, self.n_sites, self.omega_m, self.coupling_k)).collect()
    }
}

/// `ω_n = ω_m - 2K cos(nπ/(N+1))`.
pub fn chain_mode_frequency(n: usize, n_sites: usize, omega_m: f64, k: f64) -> f64 {
    omega_m - 2.0 * k * (n as f64 * PI / (n_sites as f64 + 1.0)).cos()
}

/// Normalized mode profile `c_n(j) = sqrt(2/(N+1)) sin(n j π/(N+1))`.
pub fn chain_mode_amplitude(n: usize, j: usize, n_sites: usize) -> f64 {
    let np1 = n_sites as f64 + 1.0;
    (2.0 / np1).sqrt() * (n as f64 * j as f64 * PI / np1).sin()
}
