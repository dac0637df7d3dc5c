//! Frequency-domain solution of linear quantum Langevin networks.
//!
//! Every network is solved in the doubled basis `(a1, a1†, a2, a2†, ...)`.
//! The Hamiltonian described by a [`LinearNetwork`] is
//!
//! ```text
//! H = Σ_j ω_j a_j† a_j + Σ_couplings [ G a† b + G* b† a ]            (rotating_wave = true)
//!                                    + [ G a† b† + G* b a ]           (rotating_wave = false)
//! ```
//!
//! so a non-rotating-wave coupling reproduces `(G a† + G* a)(b + b†)`.
//! Optical modes use the detuning convention `ω = -δ`.
//!
//! The Langevin equations read `dA/dt = -M A - L A_in - K B_0`, with `L`
//! the port coupling (`sqrt(rate)` per port) and `K` the intrinsic coupling
//! (`sqrt(γ0)` per mode). Output fields are `A_out = A_in + Lᵀ A`, which gives
//! `A_out(ω) = S(ω) A_in(ω) + S'(ω) B_0(ω)` with `X(ω) = (M - iω)⁻¹`,
//! `S = 1 - Lᵀ X L` and `S' = -Lᵀ X K`.

mod chain;
mod filter;
mod fit;

pub use chain::{chain_mode_amplitude, chain_mode_frequency, CoolingChain};
pub use filter::{
    closed_form_filter, impedance_matched_coupling, impedance_matched_coupling_full, single_mode_cooling_spectrum,
    FilterParams, OptomechanicalFilter,
};
pub use fit::{fit_lorentzian_dip, lorentzian_dip, DipFit, FitOptions};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Physical nature of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Optical,
    Mechanical,
}

/// One bosonic mode of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    pub label: String,
    pub kind: ModeKind,
    /// Mechanical frequency, or `-δ` for an optical mode in the drive frame.
    pub frequency: f64,
    /// Intrinsic energy damping rate (γ0).
    pub intrinsic_rate: f64,
    /// Occupation of the intrinsic bath.
    pub bath_occupation: f64,
}

impl ModeSpec {
    pub fn mechanical(label: impl Into<String>, omega: f64, gamma0: f64, n_th: f64) -> Self {
        ModeSpec { label: label.into(), kind: ModeKind::Mechanical, frequency: omega, intrinsic_rate: gamma0, bath_occupation: n_th }
    }

    /// Optical mode at laser detuning `delta` (frame rotating with the drive).
    pub fn optical(label: impl Into<String>, delta: f64) -> Self {
        ModeSpec { label: label.into(), kind: ModeKind::Optical, frequency: -delta, intrinsic_rate: 0.0, bath_occupation: 0.0 }
    }
}

/// Bilinear coupling `G a† b + h.c.` between two modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    pub mode_a: String,
    pub mode_b: String,
    pub amplitude: C64,
    /// If false, the counter-rotating part `G a† b† + h.c.` is included as well.
    pub rotating_wave: bool,
}

impl CouplingSpec {
    pub fn beam_splitter(mode_a: impl Into<String>, mode_b: impl Into<String>, amplitude: C64) -> Self {
        CouplingSpec { mode_a: mode_a.into(), mode_b: mode_b.into(), amplitude, rotating_wave: true }
    }

    pub fn full(mode_a: impl Into<String>, mode_b: impl Into<String>, amplitude: C64) -> Self {
        CouplingSpec { mode_a: mode_a.into(), mode_b: mode_b.into(), amplitude, rotating_wave: false }
    }
}

/// External channel attached to a mode, `b_out = b_in + sqrt(rate) b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSpec {
    pub mode: String,
    pub rate: f64,
    pub input_occupation: f64,
}

impl PortSpec {
    pub fn new(mode: impl Into<String>, rate: f64, input_occupation: f64) -> Self {
        PortSpec { mode: mode.into(), rate, input_occupation }
    }
}

/// Declarative description of a linear network of modes, couplings and ports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearNetwork {
    pub modes: Vec<ModeSpec>,
    pub couplings: Vec<CouplingSpec>,
    pub ports: Vec<PortSpec>,
}

impl LinearNetwork {
    pub fn new(modes: Vec<ModeSpec>, couplings: Vec<CouplingSpec>, ports: Vec<PortSpec>) -> Result<Self> {
        let net = LinearNetwork { modes, couplings, ports };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Validation("network has no modes".into()));
        }
        let mut seen = HashMap::new();
        for m in &self.modes {
            if seen.insert(m.label.as_str(), ()).is_some() {
                return Err(Error::Validation(format!("duplicate mode label `{}`", m.label)));
            }
            if !m.frequency.is_finite() {
                return Err(Error::Validation(format!("mode `{}` has non-finite frequency", m.label)));
            }
            if !(m.intrinsic_rate >= 0.0) || !m.intrinsic_rate.is_finite() {
                return Err(Error::Validation(format!("mode `{}` has negative intrinsic rate", m.label)));
            }
            if !(m.bath_occupation >= 0.0) || !m.bath_occupation.is_finite() {
                return Err(Error::Validation(format!("mode `{}` has negative bath occupation", m.label)));
            }
        }
        for c in &self.couplings {
            self.mode_index(&c.mode_a)?;
            self.mode_index(&c.mode_b)?;
            if c.mode_a == c.mode_b {
                return Err(Error::Validation(format!("coupling of `{}` to itself", c.mode_a)));
            }
            if !c.amplitude.re.is_finite() || !c.amplitude.im.is_finite() {
                return Err(Error::Validation(format!("coupling `{}`-`{}` is not finite", c.mode_a, c.mode_b)));
            }
        }
        for p in &self.ports {
            self.mode_index(&p.mode)?;
            if !(p.rate > 0.0) || !p.rate.is_finite() {
                return Err(Error::Validation(format!("port on `{}` must have a positive rate", p.mode)));
            }
            if !(p.input_occupation >= 0.0) || !p.input_occupation.is_finite() {
                return Err(Error::Validation(format!("port on `{}` has negative input occupation", p.mode)));
            }
        }
        Ok(())
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::Validation(format!("unknown mode `{label}`")))
    }

    /// Index of the (first) port attached to `label`.
    pub fn port_index(&self, label: &str) -> Result<usize> {
        self.mode_index(label)?;
        self.ports
            .iter()
            .position(|p| p.mode == label)
            .ok_or_else(|| Error::Configuration(format!("mode `{label}` has no port")))
    }

    pub fn is_rotating_wave(&self) -> bool {
        self.couplings.iter().all(|c| c.rotating_wave)
    }

    pub fn is_lossless(&self) -> bool {
        self.modes.iter().all(|m| m.intrinsic_rate == 0.0)
    }
}

/// Drift matrix in the doubled basis plus the port and bath couplings needed
/// for spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    /// `M`, dimension `2·n_modes`.
    pub matrix: DMatrix<C64>,
    /// `L`, `2·n_modes × 2·n_ports`, entries `sqrt(rate)`.
    pub port_coupling: DMatrix<C64>,
    /// `K`, `2·n_modes × 2·n_modes` diagonal, entries `sqrt(γ0)`.
    pub intrinsic_coupling: DMatrix<C64>,
    pub port_rates: Vec<f64>,
    pub port_occupations: Vec<f64>,
    pub intrinsic_rates: Vec<f64>,
    pub bath_occupations: Vec<f64>,
}

impl DriftMatrix {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn n_ports(&self) -> usize {
        self.port_rates.len()
    }

    /// Diagonal `R` of port rates in the doubled port basis.
    pub fn input_coupling(&self) -> Vec<f64> {
        self.port_rates.iter().flat_map(|&r| [r, r]).collect()
    }

    /// Largest deviation from `M = Σ M* Σ`, where Σ swaps each (x, x†) pair.
    pub fn particle_hole_defect(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let partner = |i: usize| i ^ 1;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((m[(r, c)] - m[(partner(r), partner(c))].conj()).norm());
            }
        }
        worst
    }

    /// `X(ω) = (M - iω)⁻¹`, verified by its residual.
    pub fn susceptibility(&self, omega: f64) -> Result<DMatrix<C64>> {
        let n = self.dimension();
        let mut a = self.matrix.clone();
        for k in 0..n {
            a[(k, k)] -= I * omega;
        }
        let x = a.clone().lu().try_inverse().ok_or(Error::Singular { omega, residual: f64::INFINITY })?;
        let mut r = &a * &x;
        for k in 0..n {
            r[(k, k)] -= C64::new(1.0, 0.0);
        }
        let residual = r.norm() / (n as f64).sqrt();
        if !(residual < 1e-10) {
            return Err(Error::Singular { omega, residual });
        }
        Ok(x)
    }

    /// Port and bath scattering matrices at `omega`.
    pub fn scattering(&self, omega: f64) -> Result<Scattering> {
        let x = self.susceptibility(omega)?;
        let lt = self.port_coupling.transpose();
        let ltx = &lt * &x;
        let mut s = -(&ltx * &self.port_coupling);
        for k in 0..s.nrows() {
            s[(k, k)] += C64::new(1.0, 0.0);
        }
        let s_intrinsic = -(&ltx * &self.intrinsic_coupling);
        Ok(Scattering { s, s_intrinsic })
    }

    /// Occupation spectrum of the output field of port `port` at `omega`.
    pub fn output_occupation(&self, omega: f64, port: usize) -> Result<f64> {
        let sc = self.scattering(omega)?;
        let row = 2 * port;
        let mut total = 0.0;
        for (p, &n) in self.port_occupations.iter().enumerate() {
            total += sc.s[(row, 2 * p)].norm_sqr() * n + sc.s[(row, 2 * p + 1)].norm_sqr() * (n + 1.0);
        }
        for (k, &n) in self.bath_occupations.iter().enumerate() {
            if self.intrinsic_rates[k] > 0.0 {
                total += sc.s_intrinsic[(row, 2 * k)].norm_sqr() * n
                    + sc.s_intrinsic[(row, 2 * k + 1)].norm_sqr() * (n + 1.0);
            }
        }
        Ok(total)
    }

    /// Fluctuation spectrum `<a_j†(ω) a_j(ω')> = S(ω) δ(ω-ω')` of mode `mode`.
    pub fn internal_occupation(&self, omega: f64, mode: usize) -> Result<f64> {
        let x = self.susceptibility(omega)?;
        let row = 2 * mode;
        let mut total = 0.0;
        // port channels: column of L is a single sqrt(rate) entry
        for (p, (&rate, &n)) in self.port_rates.iter().zip(&self.port_occupations).enumerate() {
            let m = self.port_mode(p);
            total += rate * (x[(row, 2 * m)].norm_sqr() * n + x[(row, 2 * m + 1)].norm_sqr() * (n + 1.0));
        }
        for (k, (&rate, &n)) in self.intrinsic_rates.iter().zip(&self.bath_occupations).enumerate() {
            if rate > 0.0 {
                total += rate * (x[(row, 2 * k)].norm_sqr() * n + x[(row, 2 * k + 1)].norm_sqr() * (n + 1.0));
            }
        }
        Ok(total)
    }

    fn port_mode(&self, p: usize) -> usize {
        (0..self.n_modes())
            .find(|&m| self.port_coupling[(2 * m, 2 * p)].norm() > 0.0)
            .expect("every port column has one nonzero entry")
    }

    /// Eigenvalues of `M` from a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let schur = nalgebra::linalg::Schur::new(self.matrix.clone());
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|k| t[(k, k)]).collect()
    }
}

/// Scattering matrices at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Scattering {
    /// Port-to-port block, `2·n_ports` square, doubled port basis.
    pub s: DMatrix<C64>,
    /// Intrinsic-bath-to-port block, `2·n_ports × 2·n_modes`.
    pub s_intrinsic: DMatrix<C64>,
}

impl Scattering {
    /// Annihilation-operator amplitude from port `from` into port `to`.
    pub fn amplitude(&self, from: usize, to: usize) -> C64 {
        self.s[(2 * to, 2 * from)]
    }
}

/// Sampled occupation spectrum with an optional dip fit.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: Option<DipFit>,
}

impl NoiseSpectrum {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Dimension { expected: grid.len(), got: values.len() });
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("frequency grid must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= -1e-12 * (1.0 + v.abs()))) {
            return Err(Error::Validation(format!("negative occupation {v:e} in spectrum")));
        }
        Ok(NoiseSpectrum { grid, values, fit: None })
    }

    /// Uniform grid of `points` frequencies spanning `[lo, hi]`.
    pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
        }
    }

    /// Index and value of the smallest sample.
    pub fn minimum(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Linear interpolation of the spectrum; constant beyond the ends.
    pub fn interpolate(&self, omega: f64) -> f64 {
        let g = &self.grid;
        if g.is_empty() {
            return 0.0;
        }
        if omega <= g[0] {
            return self.values[0];
        }
        if omega >= g[g.len() - 1] {
            return self.values[g.len() - 1];
        }
        let k = g.partition_point(|&w| w <= omega) - 1;
        let s = (omega - g[k]) / (g[k + 1] - g[k]);
        self.values[k] * (1.0 - s) + self.values[k + 1] * s
    }
}

/// Builds the doubled-basis drift matrix and checks its stability.
pub fn build_drift_matrix(network: &LinearNetwork) -> Result<DriftMatrix> {
    network.validate()?;
    let n = network.modes.len();
    let dim = 2 * n;
    let mut h = DMatrix::<C64>::zeros(n, n);
    let mut p = DMatrix::<C64>::zeros(n, n);
    for (j, m) in network.modes.iter().enumerate() {
        h[(j, j)] = C64::new(m.frequency, 0.0);
    }
    for c in &network.couplings {
        let a = network.mode_index(&c.mode_a)?;
        let b = network.mode_index(&c.mode_b)?;
        h[(a, b)] += c.amplitude;
        h[(b, a)] += c.amplitude.conj();
        if !c.rotating_wave {
            p[(a, b)] += c.amplitude;
            p[(b, a)] += c.amplitude;
        }
    }

    let mut damping = vec![0.0; n];
    for (j, m) in network.modes.iter().enumerate() {
        damping[j] += m.intrinsic_rate;
    }
    for port in &network.ports {
        damping[network.mode_index(&port.mode)?] += port.rate;
    }

    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for j in 0..n {
        for k in 0..n {
            m[(2 * j, 2 * k)] = I * h[(j, k)];
            m[(2 * j, 2 * k + 1)] = I * p[(j, k)];
            m[(2 * j + 1, 2 * k + 1)] = -I * h[(j, k)].conj();
            m[(2 * j + 1, 2 * k)] = -I * p[(j, k)].conj();
        }
        m[(2 * j, 2 * j)] += C64::new(damping[j] / 2.0, 0.0);
        m[(2 * j + 1, 2 * j + 1)] += C64::new(damping[j] / 2.0, 0.0);
    }

    let n_ports = network.ports.len();
    let mut l = DMatrix::<C64>::zeros(dim, 2 * n_ports);
    for (q, port) in network.ports.iter().enumerate() {
        let j = network.mode_index(&port.mode)?;
        let s = C64::new(port.rate.sqrt(), 0.0);
        l[(2 * j, 2 * q)] = s;
        l[(2 * j + 1, 2 * q + 1)] = s;
    }
    let mut k = DMatrix::<C64>::zeros(dim, dim);
    for (j, mode) in network.modes.iter().enumerate() {
        let s = C64::new(mode.intrinsic_rate.sqrt(), 0.0);
        k[(2 * j, 2 * j)] = s;
        k[(2 * j + 1, 2 * j + 1)] = s;
    }

    let drift = DriftMatrix {
        matrix: m,
        port_coupling: l,
        intrinsic_coupling: k,
        port_rates: network.ports.iter().map(|p| p.rate).collect(),
        port_occupations: network.ports.iter().map(|p| p.input_occupation).collect(),
        intrinsic_rates: network.modes.iter().map(|m| m.intrinsic_rate).collect(),
        bath_occupations: network.modes.iter().map(|m| m.bath_occupation).collect(),
    };

    let scale = drift.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = drift.particle_hole_defect();
    debug_assert!(defect <= 1e-14 * scale.max(1.0), "particle-hole symmetry broken: {defect:e}");
    let tol = -1e-12 * scale;
    if let Some(bad) = drift.eigenvalues().into_iter().filter(|z| z.re < tol).min_by(|a, b| a.re.total_cmp(&b.re)) {
        return Err(Error::Unstable { re: bad.re, im: bad.im });
    }
    Ok(drift)
}

/// `X(ω)` of a built drift matrix.
pub fn susceptibility(drift: &DriftMatrix, omega: f64) -> Result<DMatrix<C64>> {
    drift.susceptibility(omega)
}

/// Scattering matrices `(S, S')` of `network` at `omega`.
pub fn scattering(network: &LinearNetwork, omega: f64) -> Result<Scattering> {
    build_drift_matrix(network)?.scattering(omega)
}

/// Annihilation-only susceptibility for rotating-wave networks, used as an
/// independent check on the doubled-basis solve.
pub fn susceptibility_half(drift: &DriftMatrix, omega: f64) -> Result<DMatrix<C64>> {
    let n = drift.n_modes();
    let mut a = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if drift.matrix[(2 * j, 2 * k + 1)].norm() > 0.0 {
                return Err(Error::Validation("network has counter-rotating terms".into()));
            }
            a[(j, k)] = drift.matrix[(2 * j, 2 * k)];
        }
        a[(j, j)] -= I * omega;
    }
    a.lu().try_inverse().ok_or(Error::Singular { omega, residual: f64::INFINITY })
}

fn sample<F>(grid: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter().map(|&w| f(w)).collect()
}

/// Fluctuation spectrum of mode `mode` over `grid`.
pub fn internal_spectrum(network: &LinearNetwork, grid: &[f64], mode: &str) -> Result<NoiseSpectrum> {
    let drift = build_drift_matrix(network)?;
    let j = network.mode_index(mode)?;
    let values = sample(grid, |w| drift.internal_occupation(w, j))?;
    NoiseSpectrum::new(grid.to_vec(), values)
}

/// Occupation spectrum of the output field leaving through the port attached to `mode`.
pub fn output_spectrum(network: &LinearNetwork, grid: &[f64], mode: &str) -> Result<NoiseSpectrum> {
    let drift = build_drift_matrix(network)?;
    let q = network.port_index(mode)?;
    let values = sample(grid, |w| drift.output_occupation(w, q))?;
    NoiseSpectrum::new(grid.to_vec(), values)
}

/// Spectrum `N_F(ω)` of the field reflected into the mechanical waveguide.
pub fn filtered_noise_spectrum(network: &LinearNetwork, grid: &[f64]) -> Result<NoiseSpectrum> {
    let mech_ports: Vec<&PortSpec> = network
        .ports
        .iter()
        .filter(|p| network.modes.iter().any(|m| m.label == p.mode && m.kind == ModeKind::Mechanical))
        .collect();
    match mech_ports.as_slice() {
        [port] => output_spectrum(network, grid, &port.mode),
        [] => Err(Error::Configuration("network has no mechanical waveguide port".into())),
        _ => Err(Error::Configuration("network has more than one mechanical waveguide port".into())),
    }
}
