//! Damped least-squares fit of a Lorentzian noise dip.

use super::NoiseSpectrum;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Fitted dip `N(ω) = B - (B - N0) γ̃² / ((ω - ω̃)² + γ̃²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipFit {
    /// Dip center ω̃.
    pub center: f64,
    /// Half width γ̃.
    pub width: f64,
    /// Floor N0.
    pub floor: f64,
    /// Far-off-resonance level B (N_th).
    pub baseline: f64,
    /// RMS of the weighted residuals.
    pub rms: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Fix the baseline instead of fitting it.
    pub baseline: Option<f64>,
    /// Weight residuals by `1/N(ω)` so the floor is resolved as well as the shoulders.
    pub relative_weights: bool,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { baseline: None, relative_weights: true, max_iterations: 500 }
    }
}

pub fn lorentzian_dip(omega: f64, center: f64, width: f64, floor: f64, baseline: f64) -> f64 {
    let w2 = width * width;
    baseline - (baseline - floor) * w2 / ((omega - center).powi(2) + w2)
}

/// Fits the dip model to `spectrum`, starting from the sampled minimum and its
/// half-width at half depth.
pub fn fit_lorentzian_dip(spectrum: &NoiseSpectrum, opts: &FitOptions) -> Result<DipFit> {
    let x = &spectrum.grid;
    let y = &spectrum.values;
    let n = x.len();
    if n < 5 {
        return Err(Error::Fit("need at least five samples".into()));
    }
    let (imin, ymin) = spectrum.minimum().ok_or_else(|| Error::Fit("empty spectrum".into()))?;
    if imin == 0 || imin == n - 1 {
        return Err(Error::Fit("minimum lies on the grid boundary".into()));
    }
    let edge = y[0].max(y[n - 1]);
    let base0 = opts.baseline.unwrap_or(edge);
    if !(base0 > ymin) {
        return Err(Error::Fit("spectrum has no dip".into()));
    }
    let half = 0.5 * (base0 + ymin);
    let left = (0..imin).rev().find(|&i| y[i] >= half).map(|i| crossing(x, y, i, i + 1, half));
    let right = (imin + 1..n).find(|&i| y[i] >= half).map(|i| crossing(x, y, i - 1, i, half));
    let width0 = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => x[imin] - l,
        (None, Some(r)) => r - x[imin],
        (None, None) => 0.25 * (x[n - 1] - x[0]),
    }
    .max(1e-6 * (x[n - 1] - x[0]));

    let ymax = y.iter().copied().fold(0.0_f64, f64::max);
    let weights: Vec<f64> = if opts.relative_weights {
        y.iter().map(|&v| 1.0 / v.abs().max(1e-12 * ymax).max(f64::MIN_POSITIVE)).collect()
    } else {
        vec![1.0; n]
    };

    let fit_baseline = opts.baseline.is_none();
    let np = if fit_baseline { 4 } else { 3 };
    let mut p = vec![x[imin], width0, ymin, base0];

    let residuals = |p: &[f64]| -> DVector<f64> {
        DVector::from_iterator(n, (0..n).map(|i| (lorentzian_dip(x[i], p[0], p[1], p[2], p[3]) - y[i]) * weights[i]))
    };
    let jacobian = |p: &[f64]| -> DMatrix<f64> {
        let mut j = DMatrix::<f64>::zeros(n, np);
        for i in 0..n {
            let d = x[i] - p[0];
            let w2 = p[1] * p[1];
            let den = d * d + w2;
            let l = w2 / den;
            let depth = p[3] - p[2];
            j[(i, 0)] = -depth * w2 * 2.0 * d / (den * den) * weights[i];
            j[(i, 1)] = -depth * (2.0 * p[1] * d * d) / (den * den) * weights[i];
            j[(i, 2)] = l * weights[i];
            if fit_baseline {
                j[(i, 3)] = (1.0 - l) * weights[i];
            }
        }
        j
    };

    let mut r = residuals(&p);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    for it in 0..opts.max_iterations {
        iterations = it + 1;
        let j = jacobian(&p);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        let mut step_small = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p.clone();
            for k in 0..np {
                trial[k] += delta[k];
            }
            trial[1] = trial[1].abs();
            let rt = residuals(&trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct <= cost {
                step_small = (0..np).all(|k| delta[k].abs() <= 1e-14 * p[k].abs().max(1e-300) + 1e-300);
                let rel = (cost - ct) / cost.max(1e-300);
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                improved = rel > 1e-15 || !step_small;
                break;
            }
            lambda *= 4.0;
        }
        if !improved || step_small {
            break;
        }
    }
    if !p.iter().all(|v| v.is_finite()) || !(p[1] > 0.0) {
        return Err(Error::Fit("fit diverged".into()));
    }
    let rms = (cost / n as f64).sqrt();
    Ok(DipFit { center: p[0], width: p[1], floor: p[2], baseline: p[3], rms, iterations })
}

fn crossing(x: &[f64], y: &[f64], i: usize, j: usize, level: f64) -> f64 {
    if (y[j] - y[i]).abs() < f64::MIN_POSITIVE {
        return x[i];
    }
    x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i])
}
