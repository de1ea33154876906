//! Summability of weighted prime sums over the complement, `L^q` norms of
//! `ψ_K` along `σ = 1 + δ`, and the weighted-sum inequality used to bound
//! sums over the complementary semigroup by sums over its primes.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::primes::PrimeTable;
use crate::selector::PrimeSelector;
use crate::semigroup::generate_complementary;
use crate::sum::KahanSum;
use crate::zeta::{psi_k, ZetaOptions};
use crate::semigroup::Semigroup;

/// Weights `f(n)`, clamped at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// `max(0, log log n)`.
    LogLog,
    /// `(log n)^e`.
    LogPow(f64),
    /// Number of prime factors with multiplicity.
    Omega,
    /// `log(1 + log n)`: same growth class as `log log n`, and subadditive.
    LogOnePlusLog,
}

impl Weight {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "loglog" => Ok(Weight::LogLog),
            "omega" => Ok(Weight::Omega),
            "log1p-log" => Ok(Weight::LogOnePlusLog),
            other => {
                let e = other
                    .strip_prefix("logpow:")
                    .and_then(|e| e.parse::<f64>().ok())
                    .ok_or_else(|| Error::input(format!("unknown weight `{other}`")))?;
                if !(e > 0.0) {
                    return Err(Error::input("logpow exponent must be positive"));
                }
                Ok(Weight::LogPow(e))
            }
        }
    }

    /// `f(p)` at a prime.
    pub fn at_prime(&self, p: u64) -> f64 {
        match self {
            Weight::Omega => 1.0,
            _ => self.of_log((p as f64).ln()),
        }
    }

    fn of_log(&self, l: f64) -> f64 {
        match self {
            Weight::LogLog => {
                if l > 1.0 {
                    l.ln()
                } else {
                    0.0
                }
            }
            Weight::LogPow(e) => l.max(0.0).powf(*e),
            Weight::LogOnePlusLog => l.ln_1p(),
            Weight::Omega => unreachable!(),
        }
    }

    /// `f(n)`; `Ω` is evaluated by trial division over `table`.
    pub fn at(&self, n: u64, table: &PrimeTable) -> f64 {
        match self {
            Weight::Omega => {
                let mut r = n;
                let mut count = 0;
                for &p in table.primes() {
                    if p * p > r {
                        break;
                    }
                    while r.is_multiple_of(p) {
                        r /= p;
                        count += 1;
                    }
                }
                (count + (r > 1) as u32) as f64
            }
            _ => self.of_log((n as f64).ln()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::LogLog => write!(f, "loglog"),
            Weight::LogPow(e) => write!(f, "logpow:{e}"),
            Weight::Omega => write!(f, "omega"),
            Weight::LogOnePlusLog => write!(f, "log1p-log"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummabilityVerdict {
    ConvergentTrend,
    DivergentTrend,
    Inconclusive,
}

/// Increments at or below this count as no growth.
const FLAT_INCREMENT: f64 = 1e-3;
/// Growth at this fraction of the `log log` increment counts as divergence.
const DIVERGENT_FRACTION: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct SummabilityScan {
    pub selector: String,
    pub weight: String,
    /// `(P0, Σ_{p ∉ Q, p <= P0} f(p)/p)`.
    pub partial_sums: Vec<(u64, f64)>,
    /// Last increment of the partial sums divided by that of `log log P0`.
    pub growth_ratio: f64,
    pub verdict: SummabilityVerdict,
}

/// Partial sums of `f(p)/p` over the complement of `Q` on a grid of cut-offs.
/// The last increment is compared with the increment of `log log P0`, the
/// divergence rate of `Σ 1/p`.
pub fn summability_scan(selector: &PrimeSelector, weight: Weight, p0_grid: &[u64], exec: Execution) -> Result<SummabilityScan> {
    if p0_grid.is_empty() {
        return Err(Error::input("empty P0 grid"));
    }
    let mut grid = p0_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let table = PrimeTable::with_execution(*grid.last().unwrap(), exec)?;
    let member = selector.resolve(&table)?;
    let mut acc = KahanSum::new();
    let mut partial_sums = Vec::with_capacity(grid.len());
    let mut gi = 0;
    for (&p, &m) in table.primes().iter().zip(&member) {
        while gi < grid.len() && grid[gi] < p {
            partial_sums.push((grid[gi], acc.value()));
            gi += 1;
        }
        if !m {
            acc.add(weight.at_prime(p) / p as f64);
        }
    }
    while gi < grid.len() {
        partial_sums.push((grid[gi], acc.value()));
        gi += 1;
    }
    let (growth_ratio, verdict) = match partial_sums.len() {
        0 | 1 => (f64::NAN, SummabilityVerdict::Inconclusive),
        n => {
            let (p1, s1) = partial_sums[n - 2];
            let (p2, s2) = partial_sums[n - 1];
            let ds = s2 - s1;
            let lnln = |p: u64| (p.max(3) as f64).ln().ln();
            let dl = lnln(p2) - lnln(p1);
            let ratio = if dl > 0.0 { ds / dl } else { f64::NAN };
            let v = if ds <= FLAT_INCREMENT {
                SummabilityVerdict::ConvergentTrend
            } else if ds >= DIVERGENT_FRACTION * dl {
                SummabilityVerdict::DivergentTrend
            } else {
                SummabilityVerdict::Inconclusive
            };
            (ratio, v)
        }
    };
    Ok(SummabilityScan {
        selector: selector.to_string(),
        weight: weight.to_string(),
        partial_sums,
        growth_ratio,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    /// `|S_{2h} − S_h| / 15` at the final refinement.
    pub error_estimate: f64,
    pub evaluations: usize,
}

const SIMPSON_START: usize = 16;
const SIMPSON_MAX: usize = 1 << 16;

/// Composite Simpson rule on `[a, b]`, halving the step until successive
/// values differ by less than `rel_tol` relative. Points are evaluated in
/// parallel through `exec` and reused across refinements.
pub fn simpson<F>(f: F, a: f64, b: f64, rel_tol: f64, exec: Execution) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let mut n = SIMPSON_START;
    let mut values: Vec<f64> = exec
        .map_range(n + 1, |i| f(a + (b - a) * i as f64 / n as f64))
        .into_iter()
        .collect::<Result<_>>()?;
    let rule = |v: &[f64], n: usize| {
        let h = (b - a) / n as f64;
        let mut s = KahanSum::new();
        for (i, &y) in v.iter().enumerate() {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s.add(w * y);
        }
        s.value() * h / 3.0
    };
    let mut prev = rule(&values, n);
    loop {
        let fresh: Vec<f64> = exec
            .map_range(n, |i| f(a + (b - a) * (2 * i + 1) as f64 / (2 * n) as f64))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut merged = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            merged.push(values[i]);
            merged.push(fresh[i]);
        }
        merged.push(values[n]);
        values = merged;
        n *= 2;
        let cur = rule(&values, n);
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs() || diff < f64::MIN_POSITIVE {
            return Ok(Quadrature { value: cur, error_estimate: diff / 15.0, evaluations: n + 1 });
        }
        if n >= SIMPSON_MAX {
            return Err(Error::Numeric(format!(
                "Simpson refinement did not settle on [{a}, {b}] (last change {diff:e})"
            )));
        }
        prev = cur;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderVerdict {
    Stabilizing,
    Growing,
}

/// Relative change between the last two rungs accepted as stabilisation.
pub const LADDER_STABLE_CHANGE: f64 = 0.05;
/// Relative tolerance of the Simpson refinement.
pub const QUADRATURE_REL_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRung {
    pub delta: f64,
    pub q: f64,
    pub norm: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormLadder {
    pub q: f64,
    pub t: f64,
    pub rows: Vec<NormRung>,
    pub last_relative_change: f64,
    pub verdict: LadderVerdict,
}

/// `‖ψ_K(1 + δ + i·)‖_{L^q(−T, T)}` for each `δ` of the ladder. The integrand
/// is even in `t`, so only `[0, T]` is sampled.
pub fn lq_norm_ladder(
    k: &Semigroup,
    a: f64,
    q: f64,
    t: f64,
    deltas: &[f64],
    opts: &ZetaOptions,
) -> Result<NormLadder> {
    if !(q >= 1.0) {
        return Err(Error::input(format!("q must be at least 1, got {q}")));
    }
    if !(t > 0.0) {
        return Err(Error::input(format!("T must be positive, got {t}")));
    }
    if deltas.is_empty() {
        return Err(Error::input("empty δ ladder"));
    }
    let inner = ZetaOptions { exec: Execution::Sequential, ..*opts };
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(Error::domain(format!("δ must be positive, got {delta}")));
        }
        let worst = std::sync::Mutex::new(0.0f64);
        let quad = simpson(
            |tt| {
                let r = psi_k(k, a, Complex64::new(1.0 + delta, tt), &inner)?;
                let mut w = worst.lock().unwrap();
                *w = w.max(r.truncation_bound);
                Ok(r.value.norm().powf(q))
            },
            0.0,
            t,
            QUADRATURE_REL_TOL,
            opts.exec,
        )?;
        let integral = 2.0 * quad.value;
        let norm = integral.powf(1.0 / q);
        let quad_err = 2.0 * quad.error_estimate * norm / (q * integral.max(f64::MIN_POSITIVE));
        let eval_err = (2.0 * t).powf(1.0 / q) * *worst.lock().unwrap();
        rows.push(NormRung { delta, q, norm, error_estimate: quad_err + eval_err, evaluations: quad.evaluations });
    }
    let n = rows.len();
    let last_relative_change = if n >= 2 {
        (rows[n - 1].norm - rows[n - 2].norm).abs() / rows[n - 1].norm.abs().max(f64::MIN_POSITIVE)
    } else {
        0.0
    };
    let verdict = if last_relative_change <= LADDER_STABLE_CHANGE {
        LadderVerdict::Stabilizing
    } else {
        LadderVerdict::Growing
    };
    Ok(NormLadder { q, t, rows, last_relative_change, verdict })
}

/// Default constant in `lhs <= C · rhs`.
pub const MALLIAVIN_CONSTANT: f64 = 4.0;
/// Elements of `J` entering the subadditivity spot-check.
const SUBADDITIVITY_SAMPLE: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct MalliavinReport {
    pub selector: String,
    pub weight: String,
    pub sigma: f64,
    pub bound: u64,
    /// `Σ_{n∈J, n<=X} f(n) n^{−σ}`.
    pub lhs: f64,
    /// `(Σ_{p∉Q, p<=X} f(p) p^{−σ}) · exp(Σ_{p∉Q, p<=X} p^{−σ})`.
    pub rhs: f64,
    pub constant: f64,
    pub holds: bool,
    pub pairs_checked: usize,
}

/// Compares a weighted sum over `J` with the corresponding prime sum. The
/// weight must be subadditive on `J`; this is spot-checked on all pairs of
/// small elements and an inadmissible weight is an input error.
pub fn malliavin_diagnostic(
    selector: &PrimeSelector,
    weight: Weight,
    sigma: f64,
    x: u64,
    constant: f64,
    exec: Execution,
) -> Result<MalliavinReport> {
    if !(sigma > 1.0) {
        return Err(Error::domain(format!("σ must exceed 1, got {sigma}")));
    }
    let table = PrimeTable::with_execution(x.max(2), exec)?;
    let j = generate_complementary(selector, x, exec)?;
    let f: Vec<f64> = j.elements().iter().map(|&n| weight.at(n, &table)).collect();

    let small = &j.elements()[..j.len().min(SUBADDITIVITY_SAMPLE)];
    let mut pairs = 0;
    for (a, &n) in small.iter().enumerate() {
        for &m in &small[a..] {
            let Some(nm) = n.checked_mul(m).filter(|&v| v <= x) else { break };
            let idx = j.elements().binary_search(&nm).map_err(|_| {
                Error::Numeric(format!("{nm} missing from the complementary semigroup"))
            })?;
            let b = small.iter().position(|&e| e == m).unwrap();
            if f[idx] > f[a] + f[b] + 1e-12 {
                return Err(Error::input(format!(
                    "weight {weight} is not subadditive: f({nm}) = {} > f({n}) + f({m}) = {}",
                    f[idx],
                    f[a] + f[b]
                )));
            }
            pairs += 1;
        }
    }

    let lhs: KahanSum = j.elements().iter().zip(&f).map(|(&n, &w)| w * (n as f64).powf(-sigma)).collect();
    let member = selector.resolve(&table)?;
    let (mut weighted, mut plain) = (KahanSum::new(), KahanSum::new());
    for (&p, &m) in table.primes().iter().zip(&member) {
        if !m && p <= x {
            let ps = (p as f64).powf(-sigma);
            weighted.add(weight.at_prime(p) * ps);
            plain.add(ps);
        }
    }
    let lhs = lhs.value();
    let rhs = weighted.value() * plain.value().exp();
    Ok(MalliavinReport {
        selector: selector.to_string(),
        weight: weight.to_string(),
        sigma,
        bound: x,
        lhs,
        rhs,
        constant,
        holds: lhs <= constant * rhs,
        pairs_checked: pairs,
    })
}
