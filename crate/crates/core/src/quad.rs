//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_depth: 40 }
    }
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let err = ((kron - gauss) * h).norm();
    let finite = kron.re.is_finite() && kron.im.is_finite() && err.is_finite();
    (kron * h, if finite { err } else { f64::INFINITY })
}

/// Integrates a complex function over `[a, b]`, bisecting until the
/// Kronrod–Gauss difference meets the tolerance on every piece.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (whole, whole_err) = gk15(&mut f, a, b);
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, whole, whole_err, 0u32)];
    let scale = if whole_err.is_finite() { whole.norm() } else { 0.0 };
    while let Some((lo, hi, val, err, depth)) = stack.pop() {
        let width_share = (hi - lo).abs() / (b - a).abs();
        let tol = (opts.abs_tol.max(opts.rel_tol * scale)) * width_share;
        if err <= tol {
            total += val;
            continue;
        }
        if depth >= opts.max_depth {
            return Err(Error::Quadrature { a: lo, b: hi, error: err });
        }
        let mid = 0.5 * (lo + hi);
        let (lv, le) = gk15(&mut f, lo, mid);
        let (rv, re) = gk15(&mut f, mid, hi);
        stack.push((lo, mid, lv, le, depth + 1));
        stack.push((mid, hi, rv, re, depth + 1));
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::Quadrature { a, b, error: f64::INFINITY });
    }
    Ok(total)
}

/// Real-valued convenience wrapper around [`integrate_complex`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, opts).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - (8.0 + 1.0 - 1.5 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn lorentzian_integral() {
        let g = 1e-3;
        let v = integrate(|x| g / (x * x + g * g), -1.0, 1.0, &QuadOptions::default()).unwrap();
        let exact = 2.0 * (1.0 / g).atan();
        assert!((v - exact).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_complex() {
        let v = integrate_complex(|x| Complex64::new(0.0, 5.0 * x).exp(), 0.0, 3.0, &QuadOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 15.0).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((v - exact).norm() < 1e-11);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let v = integrate(|x| x.exp(), 1.0, 0.0, &QuadOptions::default()).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn singular_integrand_reports_failure() {
        let opts = QuadOptions { max_depth: 8, ..QuadOptions::default() };
        let r = integrate(|x| 1.0 / x.abs(), -1.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
