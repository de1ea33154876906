//! `ζ_K(s) = Σ_{n∈K} n^{−s}` for `σ > 1`, the pole-subtracted `ψ_K`, and
//! Euler products over the complementary primes.

use num_complex::Complex64;
use serde::Serialize;

use crate::discrepancy::DensityModel;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::primes::PrimeTable;
use crate::selector::{ComplementExtent, PrimeSelector};
use crate::semigroup::Semigroup;
use crate::sum::ComplexKahanSum;

/// The standard approach ladder `δ ∈ {10^−1, 10^−1.5, …, 10^−3}` towards `σ = 1`.
pub fn delta_ladder() -> Vec<f64> {
    (2..=6).map(|i| 10f64.powf(-(i as f64) / 2.0)).collect()
}

/// Largest prime used by an Euler product.
pub const MAX_EULER_PRIME: u64 = 100_000_000;
const SUM_BLOCK: usize = 1 << 16;

/// How the part of the series beyond the cutoff is handled.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum TailModel {
    /// Use a density envelope when the selector has one, else [`TailModel::Plain`].
    #[default]
    Auto,
    /// Drop the tail, bounded by `Σ_{n>N} n^{−σ} <= N^{1−σ}/(σ−1)` over all integers.
    Plain,
    /// Replace the tail by `A N^{1−s}/(s−1)` with the envelope's remainder bound.
    Density(DensityModel),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaOptions {
    pub tol: f64,
    pub tail: TailModel,
    pub exec: Execution,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions { tol: 1e-8, tail: TailModel::Auto, exec: Execution::default() }
    }
}

impl ZetaOptions {
    pub fn with_tol(tol: f64) -> Self {
        ZetaOptions { tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub truncation_bound: f64,
    /// Terms (or Euler factors) evaluated; at least 1.
    pub terms_used: u64,
    /// The Euler product diverges; `value` is the last partial product.
    pub divergent: bool,
}

/// Envelope model for a semigroup, if one is known.
pub fn density_model(k: &Semigroup) -> Option<DensityModel> {
    if k.is_complementary() {
        match k.selector() {
            PrimeSelector::Exclude(v) => DensityModel::for_selector(&PrimeSelector::Include(v.clone())),
            _ if k.is_trivial() => Some(DensityModel::new(0.0, 1.0, 0)),
            _ => None,
        }
    } else {
        DensityModel::for_selector(k.selector())
    }
}

/// `Σ_{n∈K, n<=cutoff} n^{−s}`, and the number of terms.
pub fn partial_sum(k: &Semigroup, cutoff: u64, s: Complex64, exec: Execution) -> (Complex64, usize) {
    let len = k.elements().partition_point(|&n| n <= cutoff);
    let logs = &k.logs()[..len];
    let blocks = exec.map_blocks(len, SUM_BLOCK, |r| {
        let mut acc = ComplexKahanSum::new();
        for &l in &logs[r] {
            let mag = (-s.re * l).exp();
            let (sin, cos) = (s.im * l).sin_cos();
            acc.add(Complex64::new(mag * cos, -mag * sin));
        }
        acc
    });
    let mut total = ComplexKahanSum::new();
    blocks.iter().for_each(|b| total.merge(b));
    (total.value(), len)
}

fn plain_cutoff(sigma: f64, tol: f64) -> f64 {
    ((tol * (sigma - 1.0)).ln() / (1.0 - sigma)).exp().ceil().max(1.0)
}

fn density_cutoff(m: &DensityModel, sigma: f64, abs_s: f64, tol: f64) -> Option<u64> {
    let ok = |n: u64| m.zeta_remainder(n as f64, sigma, abs_s) <= tol;
    let mut hi = 16u64;
    while !ok(hi) {
        hi = hi.checked_mul(2).filter(|&h| h < 1 << 62)?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `ζ_K(s)` by direct summation with a certified truncation bound `<= tol`.
pub fn zeta_k(k: &Semigroup, s: Complex64, opts: &ZetaOptions) -> Result<EvalResult> {
    let sigma = s.re;
    if !(sigma > 1.0) {
        return Err(Error::domain(format!("direct summation needs σ > 1, got σ = {sigma}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    if k.is_trivial() {
        return Ok(EvalResult { value: Complex64::new(1.0, 0.0), truncation_bound: 0.0, terms_used: 1, divergent: false });
    }
    let model = match opts.tail {
        TailModel::Auto => density_model(k),
        TailModel::Plain => None,
        TailModel::Density(m) => Some(m),
    };
    let abs_s = s.norm();
    let (cutoff, bound) = match &model {
        Some(m) => {
            let n = density_cutoff(m, sigma, abs_s, opts.tol).unwrap_or(u64::MAX);
            (n, m.zeta_remainder(n as f64, sigma, abs_s))
        }
        None => {
            let n = plain_cutoff(sigma, opts.tol);
            let n = if n >= u64::MAX as f64 { u64::MAX } else { n as u64 };
            (n, (n as f64).powf(1.0 - sigma) / (sigma - 1.0))
        }
    };
    if cutoff > k.bound() {
        return Err(Error::InsufficientSemigroup { needed: cutoff, available: k.bound() });
    }
    let (mut value, terms) = partial_sum(k, cutoff, s, opts.exec);
    if let Some(m) = &model {
        if m.density != 0.0 {
            let one = Complex64::new(1.0, 0.0);
            value += m.density * ((one - s) * (cutoff as f64).ln()).exp() / (s - one);
        }
    }
    Ok(EvalResult { value, truncation_bound: bound, terms_used: terms.max(1) as u64, divergent: false })
}

fn log_euler_factors(primes: impl Iterator<Item = u64>, s: Complex64) -> (Complex64, u64) {
    let mut acc = ComplexKahanSum::new();
    let mut count = 0;
    for p in primes {
        let ps = (-s * (p as f64).ln()).exp();
        acc.add(-(Complex64::new(1.0, 0.0) - ps).ln());
        count += 1;
    }
    (acc.value(), count)
}

/// `ζ_J(s) = Π_{p ∉ Q} (1 − p^{−s})^{−1}`, truncated so the bound is `<= tol`.
/// At `σ = 1` a divergent product is flagged rather than reported as an error.
pub fn zeta_j_euler(selector: &PrimeSelector, s: Complex64, tol: f64, exec: Execution) -> Result<EvalResult> {
    let sigma = s.re;
    if !(sigma >= 1.0) {
        return Err(Error::domain(format!("Euler products need σ >= 1, got σ = {sigma}")));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    let complement_at = |p0: u64| -> Result<(Complex64, u64)> {
        let table = PrimeTable::with_execution(p0, exec)?;
        let member = selector.resolve(&table)?;
        Ok(log_euler_factors(
            table.primes().iter().zip(&member).filter(|(_, &m)| !m).map(|(&p, _)| p),
            s,
        ))
    };
    let done = |log: Complex64, bound: f64, terms: u64, divergent: bool| EvalResult {
        value: log.exp(),
        truncation_bound: bound,
        terms_used: terms.max(1),
        divergent,
    };
    if let ComplementExtent::Finite { max } = selector.complement_extent() {
        let (log, terms) = match selector {
            PrimeSelector::Exclude(v) => log_euler_factors(v.iter().copied(), s),
            _ if max < 2 => (Complex64::new(0.0, 0.0), 0),
            _ => complement_at(max.min(MAX_EULER_PRIME))?,
        };
        return Ok(done(log, 0.0, terms, false));
    }
    let mut p0 = 1000u64;
    loop {
        let Some(tail) = selector.complement_log_tail(p0, sigma) else {
            let (log, terms) = complement_at(MAX_EULER_PRIME.min(1_000_000))?;
            return Ok(done(log, f64::INFINITY, terms, true));
        };
        let (log, terms) = complement_at(p0)?;
        let bound = log.exp().norm() * tail.exp_m1();
        if bound <= tol {
            return Ok(done(log, bound, terms, false));
        }
        if p0 >= MAX_EULER_PRIME {
            return Err(Error::range(format!(
                "tolerance {tol} needs Euler factors beyond {MAX_EULER_PRIME} (bound {bound:.3e})"
            )));
        }
        p0 = (p0 * 10).min(MAX_EULER_PRIME);
    }
}

fn check_density(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::input(format!("density must lie in [0,1], got {a}")));
    }
    Ok(())
}

/// `ψ_K(s) = ζ_K(s)/s − A/(s−1)`.
pub fn psi_k(k: &Semigroup, a: f64, s: Complex64, opts: &ZetaOptions) -> Result<EvalResult> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    check_density(a)?;
    let z = zeta_k(k, s, opts)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(EvalResult {
        value: z.value / s - a / (s - one),
        truncation_bound: z.truncation_bound / s.norm(),
        ..z
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinePoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    /// `A δ / (δ² + t²)`.
    pub poisson_term: f64,
    pub remainder: f64,
    pub bound: f64,
}

/// `Re ζ_K(1+δ+it)` on a grid, split into the Poisson kernel term and the rest.
pub fn re_zeta_line(
    k: &Semigroup,
    a: f64,
    delta: f64,
    t_grid: &[f64],
    opts: &ZetaOptions,
) -> Result<Vec<LinePoint>> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("δ must be positive, got {delta}")));
    }
    check_density(a)?;
    let inner = ZetaOptions { exec: Execution::Sequential, ..*opts };
    opts.exec
        .map_slice(t_grid, |&t| {
            let z = zeta_k(k, Complex64::new(1.0 + delta, t), &inner)?;
            let poisson_term = a * delta / (delta * delta + t * t);
            Ok(LinePoint {
                t,
                re: z.value.re,
                im: z.value.im,
                poisson_term,
                remainder: z.value.re - poisson_term,
                bound: z.truncation_bound,
            })
        })
        .into_iter()
        .collect()
}
