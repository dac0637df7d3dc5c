//! Time-dependent emission and absorption rates Γ1(t), Γ2(t).

use crate::error::{Error, Result};

/// Default protocol window `τ_p Γ_max`.
pub const DEFAULT_WINDOW: f64 = 28.0;

/// Rate pair of the time-symmetric protocol at time `t`.
///
/// `Γ1(t) = Γ_max e^{Γ_max t} / (2 - e^{Γ_max t})` for `t < 0` and `Γ_max`
/// afterwards; `Γ2(t) = Γ1(-t)`. The exponent carries a plus sign: with a
/// minus sign the branch diverges at `t = -ln2/Γ_max` and does not vanish for
/// early times. This form solves `dΓ/dt = Γ² - sign(t) Γ_max Γ` and is
/// continuous at `t = 0`.
pub fn pulse_eq31(t: f64, gamma_max: f64) -> (f64, f64) {
    (rising(t, gamma_max), rising(-t, gamma_max))
}

fn rising(t: f64, gm: f64) -> f64 {
    if t >= 0.0 {
        gm
    } else {
        let u = (gm * t).exp();
        gm * u / (2.0 - u)
    }
}

/// `∫_{-∞}^{t} Γ1(s) ds` for the analytic pulse.
fn rising_integral(t: f64, gm: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    if t >= 0.0 {
        ln2 + gm * t
    } else {
        ln2 - (2.0 - (gm * t).exp()).ln()
    }
}

/// Piecewise-linear rate tables on a shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPulse {
    times: Vec<f64>,
    gamma1: Vec<f64>,
    gamma2: Vec<f64>,
    cum1: Vec<f64>,
    cum2: Vec<f64>,
}

fn cumulative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(times.len());
    out.push(0.0);
    for k in 1..times.len() {
        acc += 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
        out.push(acc);
    }
    out
}

impl TabulatedPulse {
    pub fn new(times: Vec<f64>, gamma1: Vec<f64>, gamma2: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Validation("a tabulated pulse needs at least two samples".into()));
        }
        if gamma1.len() != times.len() {
            return Err(Error::Dimension { expected: times.len(), got: gamma1.len() });
        }
        if gamma2.len() != times.len() {
            return Err(Error::Dimension { expected: times.len(), got: gamma2.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("pulse times must be strictly increasing".into()));
        }
        if gamma1.iter().chain(&gamma2).any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::Validation("pulse rates must be finite and non-negative".into()));
        }
        let cum1 = cumulative(&times, &gamma1);
        let cum2 = cumulative(&times, &gamma2);
        Ok(TabulatedPulse { times, gamma1, gamma2, cum1, cum2 })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn gamma1(&self) -> &[f64] {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &[f64] {
        &self.gamma2
    }

    fn segment(&self, t: f64) -> usize {
        let ts = &self.times;
        ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1) - 1
    }

    fn interp(&self, second: bool, t: f64) -> f64 {
        let ts = &self.times;
        if t < ts[0] || t > ts[ts.len() - 1] {
            return 0.0;
        }
        let values = if second { &self.gamma2 } else { &self.gamma1 };
        let k = self.segment(t);
        let s = (t - ts[k]) / (ts[k + 1] - ts[k]);
        values[k] * (1.0 - s) + values[k + 1] * s
    }

    /// `∫_{t_first}^{t}` of the interpolant, `t` inside the table.
    fn primitive(&self, second: bool, t: f64) -> f64 {
        let (values, cum) = if second { (&self.gamma2, &self.cum2) } else { (&self.gamma1, &self.cum1) };
        let k = self.segment(t);
        let dt = t - self.times[k];
        cum[k] + 0.5 * dt * (values[k] + self.interp(second, t))
    }

    /// Exact integral of the linear interpolant over `[a, b]`.
    fn integral(&self, second: bool, a: f64, b: f64) -> f64 {
        let ts = &self.times;
        let lo = a.max(ts[0]);
        let hi = b.min(ts[ts.len() - 1]);
        if hi <= lo {
            return 0.0;
        }
        self.primitive(second, hi) - self.primitive(second, lo)
    }
}

/// How the rates are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// Closed-form time-symmetric pulses, see [`pulse_eq31`].
    AnalyticEq31,
    /// Output of [`super::design_pulses_iterative`].
    IterativeDarkState(TabulatedPulse),
    UserTabulated(TabulatedPulse),
}

/// Rates Γ1(t), Γ2(t) on a window; zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub gamma_max: f64,
    pub window: (f64, f64),
    pub shape: PulseShape,
    /// Analytic rates below this value are clamped to zero.
    pub cutoff_floor: f64,
}

impl PulseSchedule {
    /// Analytic pulses on the default window `±14/Γ_max`, no floor.
    pub fn analytic(gamma_max: f64) -> Self {
        Self::analytic_with_window(gamma_max, DEFAULT_WINDOW / gamma_max)
    }

    /// Analytic pulses on `[-τ_p/2, τ_p/2]`.
    pub fn analytic_with_window(gamma_max: f64, tau_p: f64) -> Self {
        PulseSchedule {
            gamma_max,
            window: (-0.5 * tau_p, 0.5 * tau_p),
            shape: PulseShape::AnalyticEq31,
            cutoff_floor: 0.0,
        }
    }

    pub fn tabulated(pulse: TabulatedPulse) -> Self {
        let gamma_max = pulse.gamma1.iter().chain(&pulse.gamma2).copied().fold(0.0, f64::max);
        let window = (pulse.times[0], pulse.times[pulse.times.len() - 1]);
        PulseSchedule { gamma_max, window, shape: PulseShape::UserTabulated(pulse), cutoff_floor: 0.0 }
    }

    pub fn with_cutoff_floor(mut self, floor: f64) -> Self {
        self.cutoff_floor = floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_max > 0.0) || !self.gamma_max.is_finite() {
            return Err(Error::Validation("Γ_max must be positive".into()));
        }
        if !(self.window.1 > self.window.0) {
            return Err(Error::Validation("pulse window is empty".into()));
        }
        if !(self.cutoff_floor >= 0.0) {
            return Err(Error::Validation("cutoff floor must be non-negative".into()));
        }
        Ok(())
    }

    fn in_window(&self, t: f64) -> bool {
        t >= self.window.0 && t <= self.window.1
    }

    fn clamp(&self, g: f64) -> f64 {
        if g < self.cutoff_floor {
            0.0
        } else {
            g
        }
    }

    pub fn gamma1(&self, t: f64) -> f64 {
        if !self.in_window(t) {
            return 0.0;
        }
        match &self.shape {
            PulseShape::AnalyticEq31 => self.clamp(rising(t, self.gamma_max)),
            PulseShape::IterativeDarkState(p) | PulseShape::UserTabulated(p) => self.clamp(p.interp(false, t)),
        }
    }

    pub fn gamma2(&self, t: f64) -> f64 {
        if !self.in_window(t) {
            return 0.0;
        }
        match &self.shape {
            PulseShape::AnalyticEq31 => self.clamp(rising(-t, self.gamma_max)),
            PulseShape::IterativeDarkState(p) | PulseShape::UserTabulated(p) => self.clamp(p.interp(true, t)),
        }
    }

    /// Times where the rates are not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.window.0, self.window.1];
        match &self.shape {
            PulseShape::AnalyticEq31 => {
                b.push(0.0);
                if let Some(tc) = self.analytic_cutoff_time() {
                    b.push(tc);
                    b.push(-tc);
                }
            }
            PulseShape::IterativeDarkState(p) | PulseShape::UserTabulated(p) => b.extend_from_slice(&p.times),
        }
        b.retain(|&t| t >= self.window.0 && t <= self.window.1);
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }

    /// Time where the analytic Γ1 reaches the floor, if the floor is active.
    fn analytic_cutoff_time(&self) -> Option<f64> {
        let (f, gm) = (self.cutoff_floor, self.gamma_max);
        if f <= 0.0 {
            None
        } else if f >= gm {
            Some(f64::INFINITY)
        } else {
            Some((2.0 * f / (gm + f)).ln() / gm)
        }
    }

    /// `∫_a^b Γ1(t) dt`.
    pub fn integral_gamma1(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b, false)
    }

    /// `∫_a^b Γ2(t) dt`.
    pub fn integral_gamma2(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b, true)
    }

    fn integral(&self, a: f64, b: f64, second: bool) -> f64 {
        if b < a {
            return -self.integral(b, a, second);
        }
        let mut lo = a.max(self.window.0);
        let mut hi = b.min(self.window.1);
        match &self.shape {
            PulseShape::AnalyticEq31 => {
                let gm = self.gamma_max;
                let tc = self.analytic_cutoff_time().unwrap_or(f64::NEG_INFINITY);
                if second {
                    // Γ2 is supported on t <= -tc; ∫_lo^hi Γ1(-t) dt = ∫_{-hi}^{-lo} Γ1
                    hi = hi.min(-tc);
                    if hi <= lo {
                        return 0.0;
                    }
                    rising_integral(-lo, gm) - rising_integral(-hi, gm)
                } else {
                    lo = lo.max(tc);
                    if hi <= lo {
                        return 0.0;
                    }
                    rising_integral(hi, gm) - rising_integral(lo, gm)
                }
            }
            PulseShape::IterativeDarkState(p) | PulseShape::UserTabulated(p) => {
                if hi <= lo {
                    return 0.0;
                }
                if self.cutoff_floor > 0.0 {
                    // clamped interpolant: integrate numerically between knots
                    let f = |t: f64| if second { self.gamma2(t) } else { self.gamma1(t) };
                    let opts = crate::quad::QuadOptions::default();
                    let mut pts: Vec<f64> = p.times.iter().copied().filter(|&t| t > lo && t < hi).collect();
                    pts.insert(0, lo);
                    pts.push(hi);
                    pts.windows(2).map(|w| crate::quad::integrate(f, w[0], w[1], &opts).unwrap_or(0.0)).sum()
                } else {
                    p.integral(second, lo, hi)
                }
            }
        }
    }

    /// `𝒢1(t, t') = exp(-½ ∫_{t'}^{t} Γ1)`.
    pub fn envelope1(&self, t: f64, t_prime: f64) -> f64 {
        (-0.5 * self.integral_gamma1(t_prime, t)).exp()
    }

    /// `𝒢2(t, t') = exp(-½ ∫_{t'}^{t} Γ2)`.
    pub fn envelope2(&self, t: f64, t_prime: f64) -> f64 {
        (-0.5 * self.integral_gamma2(t_prime, t)).exp()
    }

    /// Uniform grid over the window with spacing at most `step`, always
    /// containing every breakpoint.
    pub fn fine_grid(&self, step: f64) -> Vec<f64> {
        let (a, b) = self.window;
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let mut g: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        g.extend(self.breakpoints());
        g.sort_by(|x, y| x.total_cmp(y));
        g.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b - a));
        g
    }
}
