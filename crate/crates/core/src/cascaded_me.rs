//! Cascaded master equation for a filter cavity feeding two qubits through a
//! unidirectional channel, and its two-qubit reduction with white noise.
//!
//! Subsystems are ordered cavity ⊗ qubit 1 ⊗ qubit 2. With `c0 = b`,
//! `c1 = σ1⁻`, `c2 = σ2⁻` and `S = Σ √Γk ck` the generator is
//!
//! ```text
//! ρ̇ = -i[H, ρ] + (N+1) D[S]ρ + N D[S†]ρ + γ_op D[b]ρ
//! H = -(i/2) Σ_{k>l} √(Γk Γl) (ck† cl - cl† ck)
//! ```
//!
//! plus an optional intrinsic cavity loss `γ0` into a bath at `N`.

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::transfer::PulseSchedule;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

type Op = DMatrix<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Fock cutoff heuristic `max(4, ⌈4N⌉ + 4)`, capped at 30.
pub fn default_fock_cutoff(n_th: f64) -> usize {
    ((4.0 * n_th).ceil() as usize + 4).clamp(4, 30)
}

/// The optomechanically cooled phonon cavity placed upstream of the qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    /// Coupling to the channel, Γ0.
    pub gamma: f64,
    /// Optical damping into a zero-temperature bath.
    pub gamma_op: f64,
    /// Intrinsic loss into a bath at the channel temperature.
    pub gamma0: f64,
    /// Highest Fock level kept.
    pub fock_cutoff: usize,
}

impl CavitySpec {
    /// Steady occupation `N (γ + γ0) / (γ + γ_op + γ0)`.
    pub fn steady_occupation(&self, n_th: f64) -> f64 {
        let total = self.gamma + self.gamma_op + self.gamma0;
        if total == 0.0 {
            0.0
        } else {
            n_th * (self.gamma + self.gamma0) / total
        }
    }
}

/// Qubit pure state `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub alpha: C64,
    pub beta: C64,
}

impl QubitState {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Validation("qubit state has zero norm".into()));
        }
        Ok(QubitState { alpha: alpha / n, beta: beta / n })
    }

    pub fn ground() -> Self {
        QubitState { alpha: ONE, beta: ZERO }
    }

    pub fn excited() -> Self {
        QubitState { alpha: ZERO, beta: ONE }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QubitState { alpha: C64::new(s, 0.0), beta: C64::new(s, 0.0) }
    }

    pub fn density(&self) -> Op {
        let v = [self.alpha, self.beta];
        DMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj())
    }

    /// State after a lossless transfer with amplitude `-1` (the phase the
    /// dark-state protocol imprints).
    pub fn transferred(&self) -> Self {
        QubitState { alpha: self.alpha, beta: -self.beta }
    }
}

/// Density matrix with its time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub entries: Op,
    pub time: f64,
}

impl DensityMatrix {
    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Cascaded cavity and qubit model; `cavity = None` gives the two-qubit
/// model with white channel noise `n_th`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedModel {
    pub schedule: PulseSchedule,
    pub n_th: f64,
    pub cavity: Option<CavitySpec>,
}

/// Populations and diagnostics sampled along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Excited-state populations of qubits 1 and 2.
    pub excited1: Vec<f64>,
    pub excited2: Vec<f64>,
    pub cavity_occupation: Vec<f64>,
    pub trace: Vec<f64>,
    /// `(time, smallest eigenvalue)` at up to ten sample times.
    pub positivity: Vec<(f64, f64)>,
    pub final_state: DensityMatrix,
}

impl Trajectory {
    pub fn max_trace_drift(&self) -> f64 {
        self.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.positivity.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

struct Operators {
    dim: usize,
    b: Op,
    s1: Op,
    s2: Op,
    nb: Op,
}

fn max_abs(m: &Op) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn kron(a: &Op, b: &Op) -> Op {
    a.kronecker(b)
}

fn lowering(levels: usize) -> Op {
    let mut m = DMatrix::zeros(levels, levels);
    for n in 1..levels {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    m
}

impl CascadedModel {
    /// Filter cavity with coupling `gamma`, optical damping `gamma_op` and
    /// intrinsic loss `gamma0`, default Fock cutoff.
    pub fn filtered(schedule: PulseSchedule, n_th: f64, gamma: f64, gamma_op: f64, gamma0: f64) -> Self {
        let fock_cutoff = default_fock_cutoff(n_th);
        CascadedModel { schedule, n_th, cavity: Some(CavitySpec { gamma, gamma_op, gamma0, fock_cutoff }) }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if !(self.n_th >= 0.0) || !self.n_th.is_finite() {
            return Err(Error::Validation("thermal occupation must be non-negative".into()));
        }
        if let Some(c) = &self.cavity {
            if c.fock_cutoff < 2 {
                return Err(Error::Validation("Fock cutoff must be at least 2".into()));
            }
            for (name, r) in [("gamma", c.gamma), ("gamma_op", c.gamma_op), ("gamma0", c.gamma0)] {
                if !(r >= 0.0) || !r.is_finite() {
                    return Err(Error::Validation(format!("cavity rate {name} must be non-negative")));
                }
            }
        }
        Ok(())
    }

    fn cavity_levels(&self) -> usize {
        self.cavity.map_or(1, |c| c.fock_cutoff + 1)
    }

    pub fn dimension(&self) -> usize {
        4 * self.cavity_levels()
    }

    fn operators(&self) -> Operators {
        let nc = self.cavity_levels();
        let id_c = DMatrix::<C64>::identity(nc, nc);
        let id_q = DMatrix::<C64>::identity(2, 2);
        let sm = lowering(2);
        let b = kron(&kron(&lowering(nc), &id_q), &id_q);
        let s1 = kron(&kron(&id_c, &sm), &id_q);
        let s2 = kron(&kron(&id_c, &id_q), &sm);
        let nb = b.adjoint() * &b;
        Operators { dim: 4 * nc, b, s1, s2, nb }
    }

    /// Thermal cavity at its steady occupation, qubit 1 in `q1`, qubit 2 in
    /// its ground state.
    pub fn initial_state(&self, q1: &QubitState) -> DensityMatrix {
        let nc = self.cavity_levels();
        let n = self.cavity.map_or(0.0, |c| c.steady_occupation(self.n_th));
        let ratio = n / (1.0 + n);
        let mut weights: Vec<f64> = (0..nc).map(|k| ratio.powi(k as i32)).collect();
        let z: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= z);
        let cav = DMatrix::from_fn(nc, nc, |i, j| if i == j { C64::new(weights[i], 0.0) } else { ZERO });
        self.product_state(&cav, &q1.density(), &QubitState::ground().density())
    }

    pub fn product_state(&self, cavity: &Op, q1: &Op, q2: &Op) -> DensityMatrix {
        DensityMatrix { entries: kron(&kron(cavity, q1), q2), time: self.schedule.window.0 }
    }

    fn rates(&self, t: f64) -> [f64; 3] {
        [self.cavity.map_or(0.0, |c| c.gamma), self.schedule.gamma1(t), self.schedule.gamma2(t)]
    }

    fn generator_with(&self, ops: &Operators, t: f64, rho: &Op) -> Op {
        let r = self.rates(t);
        let sq = [r[0].sqrt(), r[1].sqrt(), r[2].sqrt()];
        let c = [&ops.b, &ops.s1, &ops.s2];
        let n = self.n_th;

        let mut s = DMatrix::<C64>::zeros(ops.dim, ops.dim);
        for k in 0..3 {
            if sq[k] != 0.0 {
                s += c[k] * C64::new(sq[k], 0.0);
            }
        }
        let mut h = DMatrix::<C64>::zeros(ops.dim, ops.dim);
        for k in 0..3 {
            for l in 0..k {
                let w = sq[k] * sq[l];
                if w != 0.0 {
                    let x = c[k].adjoint() * c[l];
                    h += (&x - x.adjoint()) * C64::new(0.0, -0.5 * w);
                }
            }
        }
        let sd = s.adjoint();
        let mut decay = (&sd * &s) * C64::new(n + 1.0, 0.0) + (&s * &sd) * C64::new(n, 0.0);
        let (gop, g0) = self.cavity.map_or((0.0, 0.0), |c| (c.gamma_op, c.gamma0));
        let loss_down = gop + g0 * (n + 1.0);
        let loss_up = g0 * n;
        if loss_down != 0.0 {
            decay += &ops.nb * C64::new(loss_down, 0.0);
        }
        if loss_up != 0.0 {
            decay += (&ops.b * ops.b.adjoint()) * C64::new(loss_up, 0.0);
        }
        let h_eff = h - decay * C64::new(0.0, 0.5);

        let a = &h_eff * rho * (-I);
        let mut out = &a + a.adjoint();
        out += (&s * rho * &sd) * C64::new(n + 1.0, 0.0);
        if n != 0.0 {
            out += (&sd * rho * &s) * C64::new(n, 0.0);
        }
        if loss_down != 0.0 {
            out += (&ops.b * rho * ops.b.adjoint()) * C64::new(loss_down, 0.0);
        }
        if loss_up != 0.0 {
            out += (ops.b.adjoint() * rho * &ops.b) * C64::new(loss_up, 0.0);
        }
        out
    }

    /// `ρ̇` at time `t`.
    pub fn lindblad_generator(&self, t: f64, rho: &Op) -> Result<Op> {
        let d = self.dimension();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::Dimension { expected: d, got: rho.nrows() });
        }
        Ok(self.generator_with(&self.operators(), t, rho))
    }

    /// Hamiltonian part of the generator (must be Hermitian).
    pub fn hamiltonian(&self, t: f64) -> Op {
        let ops = self.operators();
        let r = self.rates(t);
        let c = [&ops.b, &ops.s1, &ops.s2];
        let mut h = DMatrix::<C64>::zeros(ops.dim, ops.dim);
        for k in 0..3 {
            for l in 0..k {
                let x = c[k].adjoint() * c[l];
                h += (&x - x.adjoint()) * C64::new(0.0, -0.5 * (r[k] * r[l]).sqrt());
            }
        }
        h
    }

    /// Integrates from `rho0.time` and samples observables at `times`.
    pub fn integrate(&self, rho0: &DensityMatrix, times: &[f64], opts: &OdeOptions) -> Result<Trajectory> {
        self.validate()?;
        let d = self.dimension();
        if rho0.entries.nrows() != d || rho0.entries.ncols() != d {
            return Err(Error::Dimension { expected: d, got: rho0.entries.nrows() });
        }
        if times.is_empty() {
            return Err(Error::Validation("no output times".into()));
        }
        let ops = self.operators();
        let states = ode::integrate(
            |t, y, dy| {
                let rho = DMatrix::from_column_slice(d, d, y);
                let out = self.generator_with(&ops, t, &rho);
                dy.copy_from_slice(out.as_slice());
            },
            rho0.time,
            rho0.entries.as_slice(),
            times,
            &self.schedule.breakpoints(),
            opts,
            |y| {
                for i in 0..d {
                    for j in 0..i {
                        let avg = 0.5 * (y[i + j * d] + y[j + i * d].conj());
                        y[i + j * d] = avg;
                        y[j + i * d] = avg.conj();
                    }
                    y[i + i * d].im = 0.0;
                }
            },
        )?;

        let n1 = ops.s1.adjoint() * &ops.s1;
        let n2 = ops.s2.adjoint() * &ops.s2;
        let expect = |op: &Op, rho: &Op| (op * rho).trace().re;
        let sample_every = times.len().div_ceil(10).max(1);
        let mut traj = Trajectory {
            times: times.to_vec(),
            excited1: Vec::with_capacity(times.len()),
            excited2: Vec::with_capacity(times.len()),
            cavity_occupation: Vec::with_capacity(times.len()),
            trace: Vec::with_capacity(times.len()),
            positivity: Vec::new(),
            final_state: rho0.clone(),
        };
        for (k, (t, y)) in times.iter().zip(&states).enumerate() {
            let rho = DMatrix::from_column_slice(d, d, y);
            traj.excited1.push(expect(&n1, &rho));
            traj.excited2.push(expect(&n2, &rho));
            traj.cavity_occupation.push(expect(&ops.nb, &rho));
            traj.trace.push(rho.trace().re);
            let dm = DensityMatrix { entries: rho, time: *t };
            if k % sample_every == 0 || k + 1 == times.len() {
                traj.positivity.push((*t, dm.min_eigenvalue()));
            }
            if k + 1 == times.len() {
                traj.final_state = dm;
            }
        }
        Ok(traj)
    }

    /// Runs the protocol across the pulse window with qubit 1 prepared in
    /// `q1`, sampling `samples` equally spaced times.
    pub fn run_transfer(&self, q1: &QubitState, samples: usize) -> Result<Trajectory> {
        let rho0 = self.initial_state(q1);
        let (a, b) = self.schedule.window;
        let n = samples.max(2);
        let times: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
        self.integrate(&rho0, &times, &OdeOptions { rtol: 1e-8, atol: 1e-10, ..OdeOptions::default() })
    }
}

/// Two-qubit model driven by white noise of occupation `n_eff`.
pub fn reduced_two_qubit_model(n_eff: f64, schedule: PulseSchedule) -> CascadedModel {
    CascadedModel { schedule, n_th: n_eff, cavity: None }
}

/// Reduced state of qubit `which` (1 or 2).
pub fn qubit_state(rho: &DensityMatrix, which: usize) -> Result<Op> {
    let d = rho.entries.nrows();
    if !d.is_multiple_of(4) || !(which == 1 || which == 2) {
        return Err(Error::Validation(format!("cannot extract qubit {which} from dimension {d}")));
    }
    let nc = d / 4;
    // basis index c·4 + q1·2 + q2
    let index = |c: usize, other: usize, x: usize| if which == 1 { c * 4 + x * 2 + other } else { c * 4 + other * 2 + x };
    let mut out = DMatrix::zeros(2, 2);
    for c in 0..nc {
        for other in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    out[(x, y)] += rho.entries[(index(c, other, x), index(c, other, y))];
                }
            }
        }
    }
    Ok(out)
}

/// `Tr{ρ_target ρ}`.
pub fn fidelity(rho: &Op, target: &Op) -> Result<f64> {
    if rho.shape() != target.shape() {
        return Err(Error::Dimension { expected: target.nrows(), got: rho.nrows() });
    }
    Ok((target * rho).trace().re)
}

/// Fidelity of qubit 2 at the end of `traj` with the noiselessly transferred
/// version of `q1`.
pub fn transfer_fidelity(traj: &Trajectory, q1: &QubitState) -> Result<f64> {
    fidelity(&qubit_state(&traj.final_state, 2)?, &q1.transferred().density())
}
