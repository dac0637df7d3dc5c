//! Synthesis of the absorption pulse Γ2(t) from a given emission pulse Γ1(t).

use super::amplitudes::evolve_amplitudes;
use super::pulse::{PulseSchedule, PulseShape, TabulatedPulse};
use crate::error::{Error, Result};

/// Settings for [`design_pulses_iterative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    /// Internal step as a fraction of `1/max Γ1`.
    pub step: f64,
    /// Upper bound on Γ2 in units of `max Γ1`.
    pub ceiling: f64,
    /// Required `|𝒯(t_f)|` shortfall from one.
    pub tolerance: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions { step: 1e-3, ceiling: 1e4, tolerance: 1e-3 }
    }
}

/// Builds Γ2 so that the dark-state condition `√Γ1 v1 + √Γ2 v2 = 0` holds
/// along the evolution, for Γ1 given as a piecewise-linear table.
///
/// On the dark manifold `v2 = -√(Γ1/Γ2) v1`, so the condition fixes
/// `Γ2 = Γ1 v1² / v2²` from the current state. The result is tabulated on a
/// fine grid (spacing `step / max Γ1`, refined geometrically where `v2` starts
/// from zero since Γ2 diverges like `1/(t - t_on)` there). Each step freezes
/// the knot-averaged rates and advances `(v1, v2)` with the exact solution of
/// the linear system, using a predictor for the end-of-step Γ2.
pub fn design_pulses_iterative(times: &[f64], gamma1: &[f64], opts: &DesignOptions) -> Result<PulseSchedule> {
    let input = TabulatedPulse::new(times.to_vec(), gamma1.to_vec(), vec![0.0; times.len()])?;
    let g_max = gamma1.iter().copied().fold(0.0, f64::max);
    if g_max <= 0.0 {
        return Err(Error::Design("emission pulse is identically zero".into()));
    }
    let probe = PulseSchedule::tabulated(input);
    let (t0, tf) = (times[0], times[times.len() - 1]);
    let g1_final = probe.envelope1(tf, t0);
    if g1_final >= 1e-3 {
        return Err(Error::Design(format!("emission pulse leaves 𝒢1(t_f) = {g1_final:.3e}, needs < 1e-3")));
    }

    let ceiling = opts.ceiling * g_max;
    let knots = probe.fine_grid(opts.step / g_max);
    let mut out_t = Vec::with_capacity(knots.len() + 64);
    let mut out_g1 = Vec::with_capacity(knots.len() + 64);
    let mut out_g2 = Vec::with_capacity(knots.len() + 64);
    // the ceiling may bind only until the manifold rate first drops below it
    let mut started = false;
    let mut rate = |g1: f64, v1: f64, v2: f64, t: f64, commit: bool| -> Result<f64> {
        let want = if v2 == 0.0 { if g1 > 0.0 { f64::INFINITY } else { 0.0 } } else { g1 * v1 * v1 / (v2 * v2) };
        if want <= ceiling {
            started |= commit && v2 != 0.0;
            Ok(want)
        } else if !started {
            Ok(ceiling)
        } else {
            Err(Error::Design(format!("Γ2 = {want:.3e} exceeds the ceiling {ceiling:.3e} at t = {t:.6e}")))
        }
    };

    let (mut v1, mut v2) = (1.0f64, 0.0f64);
    let mut t = knots[0];
    out_t.push(t);
    out_g1.push(probe.gamma1(t));
    out_g2.push(rate(probe.gamma1(t), v1, v2, t, true)?);
    for &next in &knots[1..] {
        let mut sub = vec![next];
        if v2 == 0.0 && (probe.gamma1(t) > 0.0 || probe.gamma1(next) > 0.0) {
            // geometric knots toward the switch-on time
            let h = next - t;
            sub = (1..=30).rev().map(|m| t + h * 0.5f64.powi(m)).collect();
            sub.push(next);
        }
        for te in sub {
            let (g1a, g1b) = (probe.gamma1(t), probe.gamma1(te));
            let g2a = *out_g2.last().unwrap();
            let h = te - t;
            let (p1, p2) = advance(v1, v2, 0.5 * (g1a + g1b), g2a, h);
            let g2b = rate(g1b, p1, p2, te, false)?;
            let (n1, n2) = advance(v1, v2, 0.5 * (g1a + g1b), 0.5 * (g2a + g2b), h);
            v1 = n1;
            v2 = n2;
            t = te;
            out_t.push(t);
            out_g1.push(g1b);
            out_g2.push(rate(g1b, v1, v2, t, true)?);
        }
    }

    let pulse = TabulatedPulse::new(out_t, out_g1, out_g2)?;
    let mut schedule = PulseSchedule::tabulated(pulse.clone());
    schedule.shape = PulseShape::IterativeDarkState(pulse);

    let check = evolve_amplitudes(&schedule, &[t0, tf])?;
    let t_final = check.v2[1].norm();
    if t_final < 1.0 - opts.tolerance {
        return Err(Error::Design(format!("designed pulses reach |𝒯(t_f)| = {t_final:.6}")));
    }
    Ok(schedule)
}

/// Exact solution over `h` of `v̇1 = -Γ1/2 v1`, `v̇2 = -Γ2/2 v2 - √(Γ1Γ2) v1`
/// with frozen rates.
fn advance(v1: f64, v2: f64, g1: f64, g2: f64, h: f64) -> (f64, f64) {
    let (a, b) = (0.5 * g1, 0.5 * g2);
    let c = (g1 * g2).sqrt();
    let ea = (-a * h).exp();
    let eb = (-b * h).exp();
    // ∫_0^h e^{-b(h-s)} e^{-a s} ds
    let kernel = if ((b - a) * h).abs() < 1e-8 { h * ea } else { (ea - eb) / (b - a) };
    (v1 * ea, v2 * eb - c * v1 * kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::pulse::pulse_eq31;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    }

    #[test]
    fn recovers_time_reversed_analytic_pulse() {
        let ts = grid(-14.0, 14.0, 2800);
        let g1: Vec<f64> = ts.iter().map(|&t| pulse_eq31(t, 1.0).0).collect();
        let s = design_pulses_iterative(&ts, &g1, &DesignOptions::default()).unwrap();
        assert!(matches!(s.shape, PulseShape::IterativeDarkState(_)));
        let mut worst = 0.0f64;
        for &t in ts.iter().filter(|&&t| t > -9.0 && t < 9.0) {
            let expect = pulse_eq31(t, 1.0).1;
            worst = worst.max((s.gamma2(t) - expect).abs() / expect);
        }
        assert!(worst < 1e-2, "worst relative deviation {worst}");
    }

    #[test]
    fn step_pulse_gives_valid_transfer() {
        let ts = grid(0.0, 20.0, 2000);
        let g1 = vec![1.0; ts.len()];
        let s = design_pulses_iterative(&ts, &g1, &DesignOptions::default()).unwrap();
        let a = evolve_amplitudes(&s, &ts).unwrap();
        assert!(a.v2.last().unwrap().norm() >= 1.0 - 1e-3);
    }

    #[test]
    fn short_pulse_is_rejected() {
        // 𝒢1(t_f) = exp(-½·1.386) = 0.5
        let ts = grid(0.0, 1.0, 100);
        let g1 = vec![2.0 * std::f64::consts::LN_2; ts.len()];
        let r = design_pulses_iterative(&ts, &g1, &DesignOptions::default());
        assert!(matches!(r, Err(Error::Design(_))));
    }

    #[test]
    fn low_ceiling_fails() {
        let ts = grid(0.0, 20.0, 2000);
        let g1 = vec![1.0; ts.len()];
        let opts = DesignOptions { ceiling: 2.0, ..DesignOptions::default() };
        assert!(matches!(design_pulses_iterative(&ts, &g1, &opts), Err(Error::Design(_))));
    }
}
