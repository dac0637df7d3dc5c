//! Single-excitation amplitudes of the two-node protocol.

use super::pulse::PulseSchedule;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::quad::{self, QuadOptions};
use num_complex::Complex64 as C64;

/// Amplitudes on a time grid, with the closed-form envelopes and the
/// quadrature transfer amplitude as an independent evaluation path.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferAmplitudes {
    pub times: Vec<f64>,
    pub v1: Vec<C64>,
    pub v2: Vec<C64>,
    /// `𝒢1(t, t0)`.
    pub g1: Vec<f64>,
    /// `𝒢2(t, t0)`.
    pub g2: Vec<f64>,
    /// `𝒯(t, t0)`.
    pub transfer: Vec<f64>,
}

impl TransferAmplitudes {
    /// Largest deviation of `𝒢1² + 𝒯²` from one.
    pub fn norm_defect(&self) -> f64 {
        self.g1.iter().zip(&self.transfer).map(|(g, t)| (g * g + t * t - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Linear interpolation of `(v1, v2)` at `t`, clamped to the grid.
    pub fn at(&self, t: f64) -> (C64, C64) {
        let ts = &self.times;
        if t <= ts[0] {
            return (self.v1[0], self.v2[0]);
        }
        let last = ts.len() - 1;
        if t >= ts[last] {
            return (self.v1[last], self.v2[last]);
        }
        let k = ts.partition_point(|&x| x <= t) - 1;
        let s = (t - ts[k]) / (ts[k + 1] - ts[k]);
        (self.v1[k] * (1.0 - s) + self.v1[k + 1] * s, self.v2[k] * (1.0 - s) + self.v2[k + 1] * s)
    }
}

/// Evolves the amplitudes from `v1 = 1, v2 = 0` at `t_grid[0]`.
pub fn evolve_amplitudes(schedule: &PulseSchedule, t_grid: &[f64]) -> Result<TransferAmplitudes> {
    evolve_amplitudes_from(schedule, t_grid, C64::new(1.0, 0.0), C64::new(0.0, 0.0), &OdeOptions::default())
}

/// Integrates `v̇1 = -Γ1/2 v1`, `v̇2 = -Γ2/2 v2 - √(Γ1Γ2) v1` from `t_grid[0]`.
pub fn evolve_amplitudes_from(
    schedule: &PulseSchedule,
    t_grid: &[f64],
    v1_0: C64,
    v2_0: C64,
    opts: &OdeOptions,
) -> Result<TransferAmplitudes> {
    schedule.validate()?;
    if t_grid.len() < 2 {
        return Err(Error::Validation("time grid needs at least two points".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("time grid must be strictly increasing".into()));
    }
    let t0 = t_grid[0];
    let states = ode::integrate(
        |t, y, dy| {
            let g1 = schedule.gamma1(t);
            let g2 = schedule.gamma2(t);
            dy[0] = -0.5 * g1 * y[0];
            dy[1] = -0.5 * g2 * y[1] - (g1 * g2).sqrt() * y[0];
        },
        t0,
        &[v1_0, v2_0],
        t_grid,
        &schedule.breakpoints(),
        opts,
        |_| {},
    )?;

    let g1: Vec<f64> = t_grid.iter().map(|&t| schedule.envelope1(t, t0)).collect();
    let g2: Vec<f64> = t_grid.iter().map(|&t| schedule.envelope2(t, t0)).collect();
    let transfer = transfer_quadrature(schedule, t_grid)?;
    Ok(TransferAmplitudes {
        times: t_grid.to_vec(),
        v1: states.iter().map(|y| y[0]).collect(),
        v2: states.iter().map(|y| y[1]).collect(),
        g1,
        g2,
        transfer,
    })
}

/// `𝒯(t, t0) = -∫_{t0}^{t} 𝒢2(t, t') √(Γ1Γ2)(t') 𝒢1(t', t0) dt'` on the grid,
/// accumulated interval by interval.
fn transfer_quadrature(schedule: &PulseSchedule, t_grid: &[f64]) -> Result<Vec<f64>> {
    let t0 = t_grid[0];
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_depth: 40 };
    // 𝒢2(t,t') 𝒢1(t',t0) = exp(-½ I2(t)) · exp(½ (I2(t') - I1(t')))
    let integrand = |s: f64| {
        let rate = (schedule.gamma1(s) * schedule.gamma2(s)).sqrt();
        if rate == 0.0 {
            return 0.0;
        }
        rate * (0.5 * (schedule.integral_gamma2(t0, s) - schedule.integral_gamma1(t0, s))).exp()
    };
    let bps = schedule.breakpoints();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(0.0);
    for w in t_grid.windows(2) {
        let mut pts = vec![w[0]];
        pts.extend(bps.iter().copied().filter(|&b| b > w[0] && b < w[1]));
        pts.push(w[1]);
        for p in pts.windows(2) {
            acc += quad::integrate(integrand, p[0], p[1], &opts)?;
        }
        out.push(-(-0.5 * schedule.integral_gamma2(t0, w[1])).exp() * acc);
    }
    Ok(out)
}

/// `|√Γ1 v1 + √Γ2 v2|` at time `t`.
pub fn dark_state_residual(amplitudes: &TransferAmplitudes, schedule: &PulseSchedule, t: f64) -> f64 {
    let (v1, v2) = amplitudes.at(t);
    (schedule.gamma1(t).sqrt() * v1 + schedule.gamma2(t).sqrt() * v2).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::pulse::TabulatedPulse;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    }

    #[test]
    fn decoupled_second_node_stays_empty() {
        let ts = grid(0.0, 10.0, 50);
        let p = TabulatedPulse::new(ts.clone(), vec![0.7; 51], vec![0.0; 51]).unwrap();
        let s = PulseSchedule::tabulated(p);
        let a = evolve_amplitudes(&s, &ts).unwrap();
        for k in 0..ts.len() {
            assert_eq!(a.v2[k].norm(), 0.0);
            assert!((a.v1[k].re - a.g1[k]).abs() < 1e-10);
            assert!((a.g1[k] - (-0.35 * ts[k]).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_pulses_transfer_perfectly() {
        let s = PulseSchedule::analytic(1.0);
        let ts = s.fine_grid(0.05);
        let a = evolve_amplitudes(&s, &ts).unwrap();
        let last = ts.len() - 1;
        assert!(a.v2[last].norm() >= 1.0 - 1e-3);
        assert!(a.norm_defect() < 1e-6);
        for k in 0..ts.len() {
            assert!((a.v1[k].re - a.g1[k]).abs() < 1e-8);
            assert!((a.v2[k].re - a.transfer[k]).abs() < 1e-8, "t={} ode={} quad={}", ts[k], a.v2[k], a.transfer[k]);
        }
    }

    #[test]
    fn residual_small_mid_transfer() {
        let s = PulseSchedule::analytic(2.0);
        let ts = s.fine_grid(0.02);
        let a = evolve_amplitudes(&s, &ts).unwrap();
        for &t in &[-0.5, -0.1, 0.0, 0.4, 1.0, 3.0] {
            let r = dark_state_residual(&a, &s, t) / 2f64.sqrt();
            assert!(r < 1e-6, "t={t} residual {r}");
        }
    }

    #[test]
    fn residual_zero_before_pulses() {
        let s = PulseSchedule::analytic_with_window(1.0, 10.0);
        let ts = grid(-20.0, 20.0, 400);
        let a = evolve_amplitudes(&s, &ts).unwrap();
        assert_eq!(dark_state_residual(&a, &s, -15.0), 0.0);
    }

    #[test]
    fn mismatched_pulses_leave_bright_component() {
        let ts = grid(-14.0, 14.0, 560);
        let g1: Vec<f64> = ts.iter().map(|&t| crate::transfer::pulse_eq31(t, 1.0).0).collect();
        let p = TabulatedPulse::new(ts.clone(), g1.clone(), g1).unwrap();
        let s = PulseSchedule::tabulated(p);
        let a = evolve_amplitudes(&s, &ts).unwrap();
        let r = dark_state_residual(&a, &s, 0.0);
        assert!(r > 0.1, "residual {r}");
        let last = ts.len() - 1;
        assert!(a.g1[last].powi(2) + a.transfer[last].powi(2) < 0.9);
    }

    #[test]
    fn rejects_bad_grid() {
        let s = PulseSchedule::analytic(1.0);
        assert!(evolve_amplitudes(&s, &[0.0]).is_err());
        assert!(evolve_amplitudes(&s, &[0.0, 0.0]).is_err());
    }
}
