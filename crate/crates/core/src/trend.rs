//! Finite-sample surrogates for "tends to zero" statements.

use serde::Serialize;

/// Values at or below this are treated as exactly zero.
pub const ZERO_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendVerdict {
    Decaying,
    NotDecaying,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendAssessment {
    /// Least-squares slope of `|y|` against `x` over the assessed window.
    pub slope: f64,
    pub last: f64,
    pub bound: f64,
    pub points_used: usize,
    pub verdict: TrendVerdict,
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Judges whether `|y|` decays along `x`. Only points with
/// `x >= x_last - span` enter the fit (at least the last two); the verdict is
/// decaying when the fitted slope is negative, or the window is identically
/// zero, and the last value is at most `bound`.
pub fn assess_decay(points: &[(f64, f64)], span: f64, bound: f64) -> TrendAssessment {
    let Some(&(x_last, y_last)) = points.last() else {
        return TrendAssessment {
            slope: 0.0,
            last: f64::NAN,
            bound,
            points_used: 0,
            verdict: TrendVerdict::NotDecaying,
        };
    };
    let mut window: Vec<&(f64, f64)> = points.iter().filter(|(x, _)| *x >= x_last - span).collect();
    if window.len() < 2 && points.len() >= 2 {
        window = points[points.len() - 2..].iter().collect();
    }
    let xs: Vec<f64> = window.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = window.iter().map(|p| p.1.abs()).collect();
    let s = slope(&xs, &ys);
    let all_zero = ys.iter().all(|&y| y <= ZERO_FLOOR);
    let last = y_last.abs();
    let verdict = if (all_zero || s < 0.0) && last <= bound {
        TrendVerdict::Decaying
    } else {
        TrendVerdict::NotDecaying
    };
    TrendAssessment { slope: s, last, bound, points_used: xs.len(), verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decay_verdicts() {
        let falling: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 1.0 / i as f64)).collect();
        assert_eq!(assess_decay(&falling, 3.0, 0.2).verdict, TrendVerdict::Decaying);
        assert_eq!(assess_decay(&falling, 3.0, 0.05).verdict, TrendVerdict::NotDecaying);
        let flat = vec![(1.0, 0.0), (2.0, 0.0)];
        assert_eq!(assess_decay(&flat, 1.0, 0.0).verdict, TrendVerdict::Decaying);
        let rising = vec![(1.0, 0.1), (2.0, 0.2)];
        assert_eq!(assess_decay(&rising, 5.0, 1.0).verdict, TrendVerdict::NotDecaying);
        assert_eq!(assess_decay(&[], 1.0, 1.0).verdict, TrendVerdict::NotDecaying);
    }
}
