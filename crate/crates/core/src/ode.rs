//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks one from the integration span.
    pub h_init: Option<f64>,
    /// Smallest step accepted before reporting underflow.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: None, h_min: 1e-14, max_steps: 5_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` and records the state at every time in
/// `t_out` (sorted, all `>= t0`).
///
/// `breakpoints` are times where the right-hand side is not smooth; the
/// integrator never steps across one. `post_step` runs on the state after
/// every accepted step (for projections such as re-Hermitization).
pub fn integrate<F, P>(
    mut f: F,
    t0: f64,
    y0: &[Complex64],
    t_out: &[f64],
    breakpoints: &[f64],
    opts: &OdeOptions,
    mut post_step: P,
) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    P: FnMut(&mut [Complex64]),
{
    if t_out.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("output times must be sorted".into()));
    }
    if let Some(&first) = t_out.first() {
        if first < t0 {
            return Err(Error::Validation("output times precede the initial time".into()));
        }
    }
    let t_end = match t_out.last() {
        Some(&t) => t,
        None => return Ok(Vec::new()),
    };

    let mut stops: Vec<f64> = t_out.to_vec();
    stops.extend(breakpoints.iter().copied().filter(|&b| b > t0 && b < t_end));
    stops.sort_by(|a, b| a.total_cmp(b));
    stops.dedup();

    let n = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(t_out.len());
    let mut out_idx = 0;
    while out_idx < t_out.len() && t_out[out_idx] <= t0 {
        out.push(y.clone());
        out_idx += 1;
    }

    let span = t_end - t0;
    let mut h = opts.h_init.unwrap_or(1e-4 * span.max(f64::MIN_POSITIVE));
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![zero; n]);
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut steps = 0usize;

    for &stop in &stops {
        if stop <= t {
            continue;
        }
        let mut k0_valid = false;
        while t < stop {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration { t, reason: format!("exceeded {} steps", opts.max_steps) });
            }
            let remaining = stop - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_step = if last { remaining } else { h };

            if !k0_valid {
                f(t, &y, &mut k[0]);
                k0_valid = true;
            }
            stage(&y, h_step, &[(A21, &k[0])], &mut tmp);
            f(t + C2 * h_step, &tmp, &mut k[1]);
            stage(&y, h_step, &[(A31, &k[0]), (A32, &k[1])], &mut tmp);
            f(t + C3 * h_step, &tmp, &mut k[2]);
            stage(&y, h_step, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])], &mut tmp);
            f(t + C4 * h_step, &tmp, &mut k[3]);
            stage(&y, h_step, &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])], &mut tmp);
            f(t + C5 * h_step, &tmp, &mut k[4]);
            stage(
                &y,
                h_step,
                &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])],
                &mut tmp,
            );
            f(t + h_step, &tmp, &mut k[5]);
            stage(&y, h_step, &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])], &mut y_new);
            f(t + h_step, &y_new, &mut k[6]);

            let mut err_sq = 0.0;
            for i in 0..n {
                let e = h_step
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err_sq += (e.norm() / scale).powi(2);
            }
            let err = if n > 0 { (err_sq / n as f64).sqrt() } else { 0.0 };
            if !err.is_finite() {
                return Err(Error::Integration { t, reason: "non-finite state".into() });
            }

            if err <= 1.0 {
                t = if last { stop } else { t + h_step };
                std::mem::swap(&mut y, &mut y_new);
                post_step(&mut y);
                // the projection may have moved y, so recompute instead of reusing k7
                k0_valid = false;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || factor < 1.0 {
                    h = h_step * factor;
                }
            } else {
                h = h_step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < opts.h_min {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size {h:e} below minimum {:e} (error ratio {err:.3e})", opts.h_min),
                    });
                }
            }
        }
        while out_idx < t_out.len() && t_out[out_idx] <= t {
            out.push(y.clone());
            out_idx += 1;
        }
    }
    Ok(out)
}

fn stage(y: &[Complex64], h: f64, terms: &[(f64, &Vec<Complex64>)], out: &mut [Complex64]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        let ha = h * a;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ha * ki;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_decay_matches_closed_form() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let out = integrate(
            |_, y, dy| dy[0] = -0.7 * y[0],
            0.0,
            &[c(1.0)],
            &times,
            &[],
            &OdeOptions::default(),
            |_| {},
        )
        .unwrap();
        for (t, y) in times.iter().zip(&out) {
            assert!((y[0].re - (-0.7 * t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_preserves_phase() {
        let out = integrate(
            |_, y, dy| dy[0] = Complex64::new(0.0, -3.0) * y[0],
            0.0,
            &[c(1.0)],
            &[0.0, 10.0, 100.0],
            &[],
            &OdeOptions::default(),
            |_| {},
        )
        .unwrap();
        let expect = Complex64::new(0.0, -300.0).exp();
        assert!((out[2][0] - expect).norm() < 1e-7);
    }

    #[test]
    fn breakpoint_in_rhs_is_resolved() {
        let out = integrate(
            |t, _, dy| dy[0] = c((1.0 - t).max(0.0)),
            0.0,
            &[c(0.0)],
            &[3.0],
            &[1.0],
            &OdeOptions::default(),
            |_| {},
        )
        .unwrap();
        assert!((out[0][0].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unsorted_output_times_rejected() {
        let r = integrate(|_, _, _| {}, 0.0, &[c(0.0)], &[2.0, 1.0], &[], &OdeOptions::default(), |_| {});
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn output_at_initial_time_is_initial_state() {
        let out =
            integrate(|_, y, dy| dy[0] = y[0], 0.0, &[c(2.0)], &[0.0, 1.0], &[], &OdeOptions::default(), |_| {})
                .unwrap();
        assert_eq!(out[0][0], c(2.0));
        assert!((out[1][0].re - 2.0 * 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let opts = OdeOptions { max_steps: 3, ..OdeOptions::default() };
        let r = integrate(|_, y, dy| dy[0] = -y[0], 0.0, &[c(1.0)], &[100.0], &[], &opts, |_| {});
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
