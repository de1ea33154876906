//! Sine and cosine integrals.
//!
//! `Cin(x) = ∫_0^x (1 − cos t)/t dt` is used instead of `Ci` because it is
//! entire, so differences of it stay accurate near the origin.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EPS: f64 = 1e-16;
const SERIES_CUTOFF: f64 = 2.0;
const MAX_ITER: usize = 200;

/// Power series for `(Si(x), Cin(x))`, used for `0 <= x <= 2`.
fn series(x: f64) -> (f64, f64) {
    // term_k = (−1)^k x^k / k!, accumulated separately for odd and even k.
    let (mut si, mut cin) = (0.0, 0.0);
    let mut fact_term = 1.0;
    for k in 1..MAX_ITER {
        fact_term *= x / k as f64;
        let kf = k as f64;
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            si += sign * fact_term / kf;
        } else {
            let sign = if (k / 2) % 2 == 1 { 1.0 } else { -1.0 };
            cin += sign * fact_term / kf;
        }
        if kf > x && fact_term < EPS * (si.abs() + cin.abs() + f64::MIN_POSITIVE) {
            break;
        }
    }
    (si, cin)
}

/// Continued fraction for `E1(ix)`, giving `(Si(x), Ci(x))` for `x > 2`.
fn continued_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm_sqr() < EPS * EPS {
            break;
        }
    }
    let h = Complex64::new(x.cos(), -x.sin()) * h;
    (FRAC_PI_2 + h.im, -h.re)
}

/// `Si(x) = ∫_0^x sin t / t dt`. Odd.
pub fn si(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_CUTOFF { series(ax).0 } else { continued_fraction(ax).0 };
    v.copysign(x)
}

/// `Ci(x)` for `x > 0`.
pub fn ci(x: f64) -> f64 {
    assert!(x > 0.0, "Ci is defined for positive arguments");
    if x <= SERIES_CUTOFF {
        EULER_GAMMA + x.ln() - series(x).1
    } else {
        continued_fraction(x).1
    }
}

/// `Cin(x) = γ + ln|x| − Ci(|x|)`. Even.
pub fn cin(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_CUTOFF {
        series(ax).1
    } else {
        EULER_GAMMA + ax.ln() - continued_fraction(ax).1
    }
}
