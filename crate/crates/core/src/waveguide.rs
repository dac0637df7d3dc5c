//! Coupled-resonator arrays as phonon waveguides: dispersion, continuum
//! parameters, propagation losses and rethermalization of filtered noise.

use crate::error::{Error, Result};
use crate::linear_network::NoiseSpectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest segment handled by [`simulate_lossy_chain`].
pub const MAX_CHAIN_SITES: usize = 400;

/// Periodic array of identical resonators with nearest-neighbour spring coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    /// Bare resonator frequency ω0.
    pub omega0: f64,
    /// Coupling `K = k/(m ω0)`.
    pub coupling_k: f64,
    /// Lattice constant.
    pub lattice_a: f64,
    /// Intrinsic damping per resonator.
    pub intrinsic_gamma0: f64,
    pub bath_occupation: f64,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Validation("chain needs at least two sites".into()));
        }
        if !(self.omega0 > 0.0) || !(self.coupling_k >= 0.0) || !(self.lattice_a > 0.0) {
            return Err(Error::Validation("ω0 and a must be positive and K non-negative".into()));
        }
        if !(self.intrinsic_gamma0 >= 0.0) || !(self.bath_occupation >= 0.0) {
            return Err(Error::Validation("γ0 and N_th must be non-negative".into()));
        }
        Ok(())
    }

    /// Allowed mode indices `[n_lo, n_hi]`, `n_hi = N/2`.
    pub fn zone(&self) -> (i64, i64) {
        let hi = (self.n_sites / 2) as i64;
        (hi - self.n_sites as i64 + 1, hi)
    }
}

/// Long-wavelength description of the band center.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumChannel {
    /// `c = K a`.
    pub sound_speed_c: f64,
    /// `ω̃0 = ω0 - (π/2 - 1) K`.
    pub omega_offset: f64,
    /// `Δω = 2K`.
    pub bandwidth: f64,
    /// `l_γ = c / γ0` (infinite for a lossless chain).
    pub mean_free_path: f64,
    pub bath_occupation: f64,
    pub warnings: Vec<String>,
}

impl ContinuumChannel {
    /// `ω̃0 + c|q|`.
    pub fn linear_dispersion(&self, q: f64) -> f64 {
        self.omega_offset + self.sound_speed_c * q.abs()
    }
}

/// `ω_n = sqrt(ω0² + 2Kω0 (1 - cos(2πn/N)))`.
pub fn dispersion_exact(chain: &ChainSpec, n: i64) -> Result<f64> {
    chain.validate()?;
    let (lo, hi) = chain.zone();
    if n < lo || n > hi {
        return Err(Error::OutOfZone { index: n, lo, hi });
    }
    let x = 2.0 * PI * n as f64 / chain.n_sites as f64;
    Ok((chain.omega0.powi(2) + 2.0 * chain.coupling_k * chain.omega0 * (1.0 - x.cos())).sqrt())
}

/// Tight-binding dispersion `ω0 + K(1 - cos qa)`.
pub fn dispersion_tight_binding(chain: &ChainSpec, qa: f64) -> f64 {
    chain.omega0 + chain.coupling_k * (1.0 - qa.cos())
}

/// Continuum parameters of the band; warns when `K/ω0 >= 0.1`.
pub fn continuum_parameters(chain: &ChainSpec) -> ContinuumChannel {
    let k = chain.coupling_k;
    let c = k * chain.lattice_a;
    let mut warnings = Vec::new();
    if k >= 0.1 * chain.omega0 {
        warnings.push(format!("K/ω0 = {:.3} is not small; tight-binding continuum is inaccurate", k / chain.omega0));
    }
    let mean_free_path = if chain.intrinsic_gamma0 > 0.0 { c / chain.intrinsic_gamma0 } else { f64::INFINITY };
    ContinuumChannel {
        sound_speed_c: c,
        omega_offset: chain.omega0 - (PI / 2.0 - 1.0) * k,
        bandwidth: 2.0 * k,
        mean_free_path,
        bath_occupation: chain.bath_occupation,
        warnings,
    }
}

/// Decay rate `γ = 2 K_loc² / Δω` of a resonator side-coupled to the waveguide.
pub fn waveguide_coupling_rate(k_loc: f64, bandwidth: f64) -> Result<f64> {
    if !(k_loc >= 0.0) || !(bandwidth > 0.0) {
        return Err(Error::Validation("K_loc must be non-negative and the bandwidth positive".into()));
    }
    if k_loc >= bandwidth {
        return Err(Error::Validity(format!(
            "local coupling {k_loc:e} is not small compared to the bandwidth {bandwidth:e}"
        )));
    }
    Ok(2.0 * k_loc * k_loc / bandwidth)
}

/// Rethermalization after a distance `z`:
/// `N(ω, z) = e^{-z/l_γ} N(ω, 0) + N_th (1 - e^{-z/l_γ})`.
pub fn propagate_spectrum(spectrum: &NoiseSpectrum, z: f64, channel: &ContinuumChannel) -> Result<NoiseSpectrum> {
    if !(z >= 0.0) {
        return Err(Error::Validation(format!("propagation distance must be non-negative, got {z}")));
    }
    let survive = if channel.mean_free_path.is_infinite() { 1.0 } else { (-z / channel.mean_free_path).exp() };
    let n_th = channel.bath_occupation;
    let values = spectrum.values.iter().map(|&v| survive * v + n_th * (1.0 - survive)).collect();
    NoiseSpectrum::new(spectrum.grid.clone(), values)
}

/// Microscopic check of [`propagate_spectrum`]: an open segment of the chain,
/// sites `0..=site`, with matched input and output ports at its ends.
///
/// The segment uses the rotating-wave tight-binding Hamiltonian with on-site
/// frequency `ω0 + K` and hopping `K/2` (band width `2K`). Ports of rate `K`
/// impedance-match the band center. The input port at site 0 carries
/// `drive` (interpolated on its own grid); the output port at `site` carries
/// the bath occupation as its incoming noise. Each interior site loses at
/// `γ0` into a bath at `N_th`, the two end sites at `γ0/2`, so the segment
/// holds exactly `site` lattice spacings of loss. Returns the occupation of
/// the field leaving through the output port on the drive grid.
pub fn simulate_lossy_chain(chain: &ChainSpec, drive: &NoiseSpectrum, site: usize) -> Result<NoiseSpectrum> {
    chain.validate()?;
    if site >= chain.n_sites {
        return Err(Error::Validation(format!("site {site} outside a chain of {} sites", chain.n_sites)));
    }
    if site + 1 > MAX_CHAIN_SITES {
        return Err(Error::Resource(format!(
            "segment of {} sites exceeds the limit of {MAX_CHAIN_SITES}",
            site + 1
        )));
    }
    if !(chain.coupling_k > 0.0) {
        return Err(Error::Validation("lossy-chain simulation needs K > 0".into()));
    }
    let len = site + 1;
    let k = chain.coupling_k;
    let g0 = chain.intrinsic_gamma0;
    let n_th = chain.bath_occupation;
    let center = chain.omega0 + k;

    let mut loss = vec![g0; len];
    loss[0] = 0.5 * g0;
    loss[len - 1] = 0.5 * g0;
    if len == 1 {
        loss[0] = 0.0;
    }
    let mut damping = loss.clone();
    damping[0] += k;
    damping[len - 1] += k;

    let values: Vec<f64> = drive
        .grid
        .par_iter()
        .zip(drive.values.par_iter())
        .map(|(&w, &n_in)| {
            let diag: Vec<Complex64> =
                damping.iter().map(|&d| Complex64::new(d / 2.0, center - w)).collect();
            let off = Complex64::new(0.0, -k / 2.0);
            let x = tridiagonal_column(&diag, off, len - 1);
            let transmitted = (k * x[0]).norm_sqr() * n_in;
            let reflected = (Complex64::new(1.0, 0.0) - k * x[len - 1]).norm_sqr() * n_th;
            let bath: f64 = loss.iter().zip(&x).map(|(&l, xi)| k * l * xi.norm_sqr()).sum::<f64>() * n_th;
            transmitted + reflected + bath
        })
        .collect();
    NoiseSpectrum::new(drive.grid.clone(), values)
}

/// Column `col` of the inverse of the symmetric tridiagonal matrix with
/// diagonal `diag` and constant off-diagonal `off` (Thomas algorithm).
fn tridiagonal_column(diag: &[Complex64], off: Complex64, col: usize) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let rhs = |i: usize| if i == col { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    let mut denom = diag[0];
    c[0] = off / denom;
    d[0] = rhs(0) / denom;
    for i in 1..n {
        denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs(i) - off * d[i - 1]) / denom;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
