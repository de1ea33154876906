//! The frequency set `L = ⋃_{n∈K} ±[log n, log(n+1))` and window measures.
//!
//! `L` is never materialised: prefix sums of `log(1 + 1/n)` over `K` give the
//! measure of `L ∩ [0, x)` with one binary search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::semigroup::Semigroup;
use crate::sum::KahanSum;
use crate::trend::{assess_decay, TrendAssessment};

#[derive(Clone, Debug)]
pub struct FrequencySet<'a> {
    k: &'a Semigroup,
    /// `prefix[i] = Σ_{j<i} log(1 + 1/K[j])`.
    prefix: Vec<f64>,
}

impl<'a> FrequencySet<'a> {
    pub fn new(k: &'a Semigroup) -> Self {
        let mut prefix = Vec::with_capacity(k.len() + 1);
        let mut acc = KahanSum::new();
        prefix.push(0.0);
        for &n in k.elements() {
            acc.add((1.0 / n as f64).ln_1p());
            prefix.push(acc.value());
        }
        FrequencySet { k, prefix }
    }

    pub fn semigroup(&self) -> &Semigroup {
        self.k
    }

    /// `log(X + 1)`: the positive part of `L` is known on `[0, xi_max)`.
    pub fn xi_max(&self) -> f64 {
        (self.k.bound() as f64).ln_1p()
    }

    /// Total measure of `L ∩ [0, xi_max)`.
    pub fn positive_measure(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    /// `|L_+ ∩ [0, x)|`.
    fn cumulative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let logs = self.k.logs();
        let i = logs.partition_point(|&l| l < x);
        if i == 0 {
            return 0.0;
        }
        let n = self.k.elements()[i - 1] as f64;
        self.prefix[i - 1] + (x - logs[i - 1]).min((1.0 / n).ln_1p())
    }

    fn positive_part(&self, a: f64, b: f64) -> f64 {
        (self.cumulative(b) - self.cumulative(a)).max(0.0)
    }

    /// `|L ∩ (ξ − δ, ξ)|`.
    pub fn measure_window(&self, xi: f64, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::input(format!("window width must be positive, got {delta}")));
        }
        let lim = self.xi_max();
        if xi.abs() > lim || (xi - delta).abs() > lim {
            return Err(Error::range(format!(
                "window ({}, {xi}) leaves [−{lim}, {lim}]; generate a larger semigroup",
                xi - delta
            )));
        }
        Ok(self.positive_part(xi - delta, xi) + self.positive_part(-xi, delta - xi))
    }

    /// `|L ∩ (ξ − δ, ξ)|/δ − A` for each `ξ`.
    pub fn local_density_deviation(&self, a: f64, xis: &[f64], delta: f64) -> Result<Vec<f64>> {
        xis.iter().map(|&xi| Ok(self.measure_window(xi, delta)? / delta - a)).collect()
    }

    /// Decay assessment of the deviation over the top decade of `ξ`.
    pub fn deviation_trend(&self, a: f64, xis: &[f64], delta: f64, bound: f64) -> Result<TrendAssessment> {
        let dev = self.local_density_deviation(a, xis, delta)?;
        let pts: Vec<(f64, f64)> = xis.iter().copied().zip(dev).collect();
        let span = pts.last().map_or(0.0, |p| p.0 * 0.9);
        Ok(assess_decay(&pts, span, bound))
    }

    /// Index range of elements with `log k ∈ (lo, hi)`.
    fn log_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let logs = self.k.logs();
        let a = logs.partition_point(|&l| l <= lo);
        let b = logs.partition_point(|&l| l < hi);
        a..b.max(a)
    }

    /// Minimum normalised window measure over a grid, with the counting
    /// sandwich `ratio <= Σ 1/k <= e^δ ratio` at every point.
    pub fn panejah_measure_inf(&self, delta: f64, xi_grid: &[f64]) -> Result<PanejahMeasure> {
        if xi_grid.is_empty() {
            return Err(Error::input("empty ξ grid"));
        }
        let mut rows = Vec::with_capacity(xi_grid.len());
        for &xi in xi_grid {
            if xi < delta || xi > self.xi_max() {
                return Err(Error::range(format!("ξ = {xi} outside [δ, {}]", self.xi_max())));
            }
            let measure = self.measure_window(xi, delta)?;
            let range = self.log_range(xi - delta, xi);
            let count = range.len();
            let harmonic: KahanSum = self.k.elements()[range].iter().map(|&n| 1.0 / n as f64).collect();
            let ratio = count as f64 * (-xi).exp();
            let harmonic = harmonic.value();
            rows.push(SandwichRow {
                xi,
                measure,
                normalized: measure / delta,
                ratio,
                harmonic,
                upper: delta.exp() * ratio,
                holds: ratio <= harmonic && harmonic <= delta.exp() * ratio,
            });
        }
        let inf = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
        Ok(PanejahMeasure { delta, inf, rows })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichRow {
    pub xi: f64,
    /// `|L ∩ (ξ − δ, ξ)|`.
    pub measure: f64,
    pub normalized: f64,
    /// `#{k ∈ K : log k ∈ (ξ − δ, ξ)} e^{−ξ}`.
    pub ratio: f64,
    /// `Σ_{log k ∈ (ξ − δ, ξ)} 1/k`.
    pub harmonic: f64,
    /// `e^δ · ratio`.
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PanejahMeasure {
    pub delta: f64,
    /// Minimum of `|L ∩ (ξ − δ, ξ)|/δ` over the grid.
    pub inf: f64,
    pub rows: Vec<SandwichRow>,
}
