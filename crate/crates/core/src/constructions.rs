//! Prime sets showing that a prime number theorem for `Q` and the lower frame
//! bound for the generated semigroup are independent, plus the Mertens-type
//! sums and window sums used to diagnose both properties.
//!
//! * [`WindowConstruction`] removes the primes in sparse windows `(δ x_k, x_k)`
//!   with `Σ 1/log x_k < ∞`. The removed set has convergent `Σ 1/p`, yet each
//!   window carries `Σ log p / p ≈ log(1/δ)`, so the window criterion for the
//!   prime number theorem fails.
//! * [`DyadicConstruction`] removes the first `⌈2^k / (k log k)⌉` primes of every
//!   block `(2^k, 2^{k+1})`. The removed set has divergent `Σ 1/p`, while the
//!   window sums decay.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::selector::PrimeSelector;
use crate::sum::KahanSum;
use crate::trend::{assess_decay, TrendAssessment, TrendVerdict};

/// Window end points `x_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowSequence {
    /// `x_k = base^(ratio^k)` for `k >= k_start`.
    Iterated { base: f64, ratio: f64, k_start: u32 },
    /// A finite increasing list of end points.
    Explicit(Vec<f64>),
}

impl Default for WindowSequence {
    fn default() -> Self {
        WindowSequence::Iterated { base: 10.0, ratio: 2.0, k_start: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowConstruction {
    pub delta: f64,
    pub sequence: WindowSequence,
}

/// Beyond this, `x_k` overflows `f64`.
const MAX_LOG_ENDPOINT: f64 = 700.0;

fn parse_kv(params: &str) -> Result<Vec<(&str, &str)>> {
    params
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::input(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::input(format!("bad value `{v}` for `{key}`")))
}

impl WindowConstruction {
    pub fn new(delta: f64, sequence: WindowSequence) -> Result<Self> {
        let c = WindowConstruction { delta, sequence };
        c.validate()?;
        Ok(c)
    }

    /// Parses `delta=0.1,base=10,ratio=2,kstart=1` or `delta=0.5,x=100;10000`.
    pub fn parse(params: &str) -> Result<Self> {
        let mut delta = 0.1;
        let (mut base, mut ratio, mut k_start) = (10.0, 2.0, 1u32);
        let mut explicit: Option<Vec<f64>> = None;
        for (k, v) in parse_kv(params)? {
            match k {
                "delta" => delta = num(k, v)?,
                "base" => base = num(k, v)?,
                "ratio" => ratio = num(k, v)?,
                "kstart" => k_start = num(k, v)?,
                "x" => {
                    explicit = Some(
                        v.split(';')
                            .filter(|s| !s.trim().is_empty())
                            .map(|s| num(k, s.trim()))
                            .collect::<Result<_>>()?,
                    )
                }
                _ => return Err(Error::input(format!("unknown 6a parameter `{k}`"))),
            }
        }
        let sequence = match explicit {
            Some(xs) => WindowSequence::Explicit(xs),
            None => WindowSequence::Iterated { base, ratio, k_start },
        };
        Self::new(delta, sequence)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::input(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        match &self.sequence {
            WindowSequence::Iterated { base, ratio, k_start } => {
                if !(*base > 1.0 && *ratio > 1.0) {
                    return Err(Error::input("need base > 1 and ratio > 1"));
                }
                // Gaps widen with k, so the first pair decides disjointness.
                let l0 = ratio.powi(*k_start as i32) * base.ln();
                if l0 * (ratio - 1.0) < (1.0 / self.delta).ln() {
                    return Err(Error::input("windows (δx_k, x_k) overlap"));
                }
            }
            WindowSequence::Explicit(xs) => {
                for w in xs.windows(2) {
                    if self.delta * w[1] < w[0] {
                        return Err(Error::input(format!(
                            "windows ending at {} and {} overlap",
                            w[0], w[1]
                        )));
                    }
                }
                if xs.iter().any(|&x| !(x > 1.0)) {
                    return Err(Error::input("window end points must exceed 1"));
                }
            }
        }
        Ok(())
    }

    /// `(k, x_k)` for every window whose lower end `δ x_k` is below `upto`.
    pub fn endpoints(&self, upto: f64) -> Vec<(u32, f64)> {
        match &self.sequence {
            WindowSequence::Explicit(xs) => xs
                .iter()
                .enumerate()
                .filter(|(_, &x)| self.delta * x < upto)
                .map(|(i, &x)| (i as u32 + 1, x))
                .collect(),
            WindowSequence::Iterated { base, ratio, k_start } => {
                let mut out = Vec::new();
                let mut k = *k_start;
                loop {
                    let lx = ratio.powi(k as i32) * base.ln();
                    if lx > MAX_LOG_ENDPOINT || lx + self.delta.ln() >= upto.ln() {
                        break;
                    }
                    out.push((k, base.powf(ratio.powi(k as i32))));
                    k += 1;
                }
                out
            }
        }
    }

    /// Whether the prime `p` lies in one of the removed windows.
    pub fn removes(&self, p: u64) -> bool {
        let p = p as f64;
        self.endpoints(p + 1.0)
            .iter()
            .any(|&(_, x)| self.delta * x < p && p < x)
    }

    /// `Σ_k 1/log x_k`, in closed form for the iterated sequence.
    pub fn log_reciprocal_sum(&self) -> f64 {
        match &self.sequence {
            WindowSequence::Explicit(xs) => xs.iter().map(|x| 1.0 / x.ln()).sum(),
            WindowSequence::Iterated { base, ratio, k_start } => {
                ratio.powi(-(*k_start as i32)) / (base.ln() * (1.0 - 1.0 / ratio))
            }
        }
    }

    /// Upper bound on `Σ_{p removed, p > p0} 1/(p − 1)`.
    ///
    /// Window sums use the Rosser–Schoenfeld bounds
    /// `log log x + B ∓ 1/(2 log² x)` for `Σ_{p<=x} 1/p` (upper one valid for
    /// `x > 286`); the `1/(p−1) − 1/p` correction is at most `1/p0`. For the
    /// iterated sequence the terms shrink at least geometrically by `ratio`,
    /// which bounds the neglected remainder.
    pub fn complement_reciprocal_tail(&self, p0: u64) -> Option<f64> {
        let p0f = p0.max(2) as f64;
        let window_bound = |a: f64, b: f64| -> f64 {
            let a = a.max(p0f);
            if b <= a {
                return 0.0;
            }
            if b > 286.0 && a > 1.0 {
                let (la, lb) = (a.ln(), b.ln());
                (lb / la).ln() + 0.5 / (la * la) + 0.5 / (lb * lb)
            } else {
                (b / a).ln() + 1.0 / a
            }
        };
        let mut total = KahanSum::new();
        match &self.sequence {
            WindowSequence::Explicit(xs) => {
                for &x in xs {
                    total.add(window_bound(self.delta * x, x));
                }
            }
            WindowSequence::Iterated { base, ratio, k_start } => {
                let mut k = *k_start;
                loop {
                    let lx = ratio.powi(k as i32) * base.ln();
                    let la = lx + self.delta.ln();
                    if lx > MAX_LOG_ENDPOINT {
                        // Work in logs once x_k overflows.
                        let term = (lx / la).ln() + 0.5 / (la * la) + 0.5 / (lx * lx);
                        total.add(term * ratio / (ratio - 1.0));
                        break;
                    }
                    let term = window_bound(self.delta * lx.exp(), lx.exp());
                    total.add(term);
                    if term > 0.0 && term < 1e-18 {
                        total.add(term / (ratio - 1.0));
                        break;
                    }
                    k += 1;
                }
            }
        }
        Some(total.value() + 1.0 / p0f)
    }
}

impl fmt::Display for WindowConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sequence {
            WindowSequence::Iterated { base, ratio, k_start } => {
                write!(f, "delta={},base={base},ratio={ratio},kstart={k_start}", self.delta)
            }
            WindowSequence::Explicit(xs) => {
                let xs: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "delta={},x={}", self.delta, xs.join(";"))
            }
        }
    }
}

/// What to do when a block has fewer primes than its quota.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuotaPolicy {
    /// Fail with [`Error::Construction`].
    Strict,
    /// Take every prime in the block and record a warning.
    Cap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicConstruction {
    pub k0: u32,
    /// Last block; `None` means every block inside the working range.
    pub k_max: Option<u32>,
    pub policy: QuotaPolicy,
}

/// Blocks below this index never hold their full quota.
pub const QUOTA_WARNING_BELOW: u32 = 5;

impl Default for DyadicConstruction {
    fn default() -> Self {
        DyadicConstruction { k0: 2, k_max: None, policy: QuotaPolicy::Cap }
    }
}

impl DyadicConstruction {
    /// Parses `k0=2,kmax=20,policy=cap`.
    pub fn parse(params: &str) -> Result<Self> {
        let mut c = DyadicConstruction::default();
        for (k, v) in parse_kv(params)? {
            match k {
                "k0" => c.k0 = num(k, v)?,
                "kmax" => c.k_max = Some(num(k, v)?),
                "policy" => {
                    c.policy = match v {
                        "strict" => QuotaPolicy::Strict,
                        "cap" => QuotaPolicy::Cap,
                        _ => return Err(Error::input(format!("unknown policy `{v}`"))),
                    }
                }
                _ => return Err(Error::input(format!("unknown 6b parameter `{k}`"))),
            }
        }
        if c.k0 < 2 {
            return Err(Error::input("k0 must be at least 2"));
        }
        if c.k_max.is_some_and(|k| k > 62) {
            return Err(Error::input("kmax must be at most 62"));
        }
        Ok(c)
    }

    /// `⌈2^k / (k log k)⌉`.
    pub fn quota(k: u32) -> u64 {
        let kf = k as f64;
        ((1u64 << k) as f64 / (kf * kf.ln())).ceil() as u64
    }

    /// Blocks processed against a sieve up to `limit`.
    fn blocks(&self, limit: u64) -> std::ops::RangeInclusive<u32> {
        let top = 63 - limit.max(1).leading_zeros();
        let last = self.k_max.map_or(top, |k| k.min(top));
        self.k0..=last
    }

    /// The primes removed from block `k`, and whether the quota was capped.
    fn block<'t>(&self, k: u32, table: &'t PrimeTable) -> Result<(&'t [u64], bool)> {
        let lo = 1u64 << k;
        let hi = lo << 1;
        let avail = table.range(lo, hi - 1);
        let quota = Self::quota(k);
        let complete = hi <= table.limit();
        if (avail.len() as u64) < quota && complete {
            return match self.policy {
                QuotaPolicy::Strict => Err(Error::Construction { k, quota, available: avail.len() as u64 }),
                QuotaPolicy::Cap => Ok((avail, true)),
            };
        }
        Ok((&avail[..avail.len().min(quota as usize)], false))
    }

    pub fn removes(&self, p: u64, table: &PrimeTable) -> Result<bool> {
        if p < 4 {
            return Ok(false);
        }
        let k = 63 - p.leading_zeros();
        if k < self.k0 || self.k_max.is_some_and(|m| k > m) {
            return Ok(false);
        }
        let (chosen, _) = self.block(k, table)?;
        Ok(chosen.binary_search(&p).is_ok())
    }

    /// All removed primes up to the sieve limit, ascending.
    pub fn removed(&self, table: &PrimeTable) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for k in self.blocks(table.limit()) {
            out.extend_from_slice(self.block(k, table)?.0);
        }
        Ok(out)
    }

    pub(crate) fn resolve(&self, table: &PrimeTable) -> Result<Vec<bool>> {
        let removed = self.removed(table)?;
        Ok(table.primes().iter().map(|p| removed.binary_search(p).is_err()).collect())
    }
}

impl fmt::Display for DyadicConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k0={}", self.k0)?;
        if let Some(k) = self.k_max {
            write!(f, ",kmax={k}")?;
        }
        let policy = match self.policy {
            QuotaPolicy::Strict => "strict",
            QuotaPolicy::Cap => "cap",
        };
        write!(f, ",policy={policy}")
    }
}

fn log_weighted(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| (p as f64).ln() / p as f64).collect::<KahanSum>().value()
}

fn reciprocal(primes: &[u64]) -> f64 {
    primes.iter().map(|&p| 1.0 / p as f64).collect::<KahanSum>().value()
}

/// Primes of a sorted list inside the open interval `(lo, hi)`.
fn within(sorted: &[u64], lo: f64, hi: f64) -> &[u64] {
    let a = sorted.partition_point(|&p| (p as f64) <= lo);
    let b = sorted.partition_point(|&p| (p as f64) < hi);
    &sorted[a..b.max(a)]
}

fn decades(limit: u64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = 10.0;
    while x <= limit as f64 {
        out.push(x);
        x *= 10.0;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowInterval {
    pub k: u32,
    pub lower: f64,
    pub upper: f64,
    pub primes: usize,
    /// `Σ 1/p` over the removed primes of this window.
    pub reciprocal_sum: f64,
    /// `Σ log p / p` over the same primes.
    pub window_log_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    pub selector: String,
    pub delta: f64,
    pub sieve_limit: u64,
    /// Windows lying entirely inside the sieve range.
    pub intervals: Vec<WindowInterval>,
    /// Windows reaching past the sieve range, reported but not evaluated.
    pub beyond_sieve: Vec<(u32, f64, f64)>,
    /// `(x, Σ_{p removed, p <= x} 1/p)` at powers of ten.
    pub cumulative_reciprocal: Vec<(f64, f64)>,
    /// `Σ_k 1/log x_k`; finite by construction.
    pub log_reciprocal_sum: f64,
    /// Certified bound on the removed `Σ 1/(p−1)` beyond the sieve.
    pub tail_beyond_sieve: Option<f64>,
    pub notes: Vec<String>,
}

impl WindowReport {
    /// Nonzero decade increments of the cumulative reciprocal sum.
    pub fn decade_increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        let mut out = Vec::new();
        for &(_, s) in &self.cumulative_reciprocal {
            let inc = s - prev;
            if inc > 0.0 {
                out.push(inc);
            }
            prev = s;
        }
        out
    }

    /// Each nonzero decade increment is at most `1/factor` of the previous one.
    pub fn increments_shrink_by(&self, factor: f64) -> bool {
        let inc = self.decade_increments();
        inc.len() >= 2 && inc.windows(2).all(|w| w[1] * factor <= w[0])
    }
}

/// Builds `Q = ℙ ∖ ⋃ (δ x_k, x_k)` and its verification data.
pub fn construct_windows(c: &WindowConstruction, table: &PrimeTable) -> Result<WindowReport> {
    c.validate()?;
    let limit = table.limit();
    let mut intervals = Vec::new();
    let mut beyond = Vec::new();
    let mut removed: Vec<u64> = Vec::new();
    for (k, x) in c.endpoints(limit as f64 + 1.0) {
        let lo = c.delta * x;
        if x > limit as f64 {
            beyond.push((k, lo, x));
            continue;
        }
        let ps = table.open_interval(lo, x);
        removed.extend_from_slice(ps);
        intervals.push(WindowInterval {
            k,
            lower: lo,
            upper: x,
            primes: ps.len(),
            reciprocal_sum: reciprocal(ps),
            window_log_sum: log_weighted(ps),
        });
    }
    let cumulative_reciprocal = decades(limit)
        .into_iter()
        .map(|x| (x, reciprocal(within(&removed, 0.0, x + 0.5))))
        .collect();
    let mut notes = Vec::new();
    if !beyond.is_empty() {
        notes.push(format!(
            "{} window(s) start below the sieve limit {limit} but end beyond it; only complete windows are evaluated",
            beyond.len()
        ));
    }
    notes.push("all statements are finite-range trends, not limits".to_string());
    Ok(WindowReport {
        selector: PrimeSelector::Windows(c.clone()).to_string(),
        delta: c.delta,
        sieve_limit: limit,
        intervals,
        beyond_sieve: beyond,
        cumulative_reciprocal,
        log_reciprocal_sum: c.log_reciprocal_sum(),
        tail_beyond_sieve: c.complement_reciprocal_tail(limit),
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicBlock {
    pub k: u32,
    pub quota: u64,
    pub available: usize,
    pub chosen: Vec<u64>,
    pub capped: bool,
    pub reciprocal_sum: f64,
    /// `1/(k log k)`.
    pub reference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialSumRow {
    pub k: u32,
    pub x: u64,
    pub sum: f64,
    /// `Σ_{j=k0}^{k} 1/(j log j)`.
    pub reference_sum: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowSumRow {
    pub delta: f64,
    pub x: f64,
    /// `Σ_{p removed, δx < p < x} log p / p`.
    pub sum: f64,
    /// `3 / log x`.
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicReport {
    pub selector: String,
    pub sieve_limit: u64,
    pub blocks: Vec<DyadicBlock>,
    pub partial_sums: Vec<PartialSumRow>,
    pub windows: Vec<WindowSumRow>,
    /// Per δ, the smallest sampled `x` from which the window sum stays below `3/log x`.
    pub bound_holds_from: Vec<(f64, Option<f64>)>,
    pub warnings: Vec<String>,
}

impl DyadicReport {
    /// Every block increment lies within `factor` of `1/(k log k)`.
    pub fn tracks_reference(&self, factor: f64) -> bool {
        !self.blocks.is_empty()
            && self.blocks.iter().all(|b| {
                let r = b.reciprocal_sum / b.reference;
                r <= factor && r >= 1.0 / factor
            })
    }
}

/// Builds `Q = ℙ ∖ ⋃_k {first q_k primes of (2^k, 2^{k+1})}` over complete
/// blocks inside the sieve, plus partial sums and window sums at `samples`.
pub fn construct_dyadic(
    c: &DyadicConstruction,
    table: &PrimeTable,
    deltas: &[f64],
    samples: &[f64],
) -> Result<DyadicReport> {
    let limit = table.limit();
    let mut blocks = Vec::new();
    let mut warnings = Vec::new();
    let mut removed = Vec::new();
    for k in c.blocks(limit) {
        if (1u64 << (k + 1)) > limit {
            warnings.push(format!("block k = {k} reaches past the sieve limit and is left out"));
            break;
        }
        let (chosen, capped) = c.block(k, table)?;
        if capped {
            warnings.push(format!(
                "block k = {k}: quota {} capped at the {} available primes",
                DyadicConstruction::quota(k),
                chosen.len()
            ));
        } else if k < QUOTA_WARNING_BELOW {
            warnings.push(format!("block k = {k} lies below k = {QUOTA_WARNING_BELOW}, where quotas are only approximate"));
        }
        removed.extend_from_slice(chosen);
        let kf = k as f64;
        blocks.push(DyadicBlock {
            k,
            quota: DyadicConstruction::quota(k),
            available: table.range(1 << k, (2 << k) - 1).len(),
            chosen: chosen.to_vec(),
            capped,
            reciprocal_sum: reciprocal(chosen),
            reference: 1.0 / (kf * kf.ln()),
        });
    }

    let mut partial_sums = Vec::new();
    let (mut sum, mut reference) = (KahanSum::new(), KahanSum::new());
    for b in &blocks {
        sum.add(b.reciprocal_sum);
        reference.add(b.reference);
        partial_sums.push(PartialSumRow {
            k: b.k,
            x: 2 << b.k,
            sum: sum.value(),
            reference_sum: reference.value(),
            ratio: sum.value() / reference.value(),
        });
    }

    let covered = blocks.last().map_or(0, |b| 2u64 << b.k) as f64;
    let mut windows = Vec::new();
    let mut bound_holds_from = Vec::new();
    for &delta in deltas {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::input(format!("delta must lie in (0,1), got {delta}")));
        }
        let mut first: Option<f64> = None;
        for &x in samples {
            if x > covered {
                return Err(Error::range(format!(
                    "sample x = {x} lies beyond the complete blocks (up to {covered})"
                )));
            }
            let s = log_weighted(within(&removed, delta * x, x));
            let scale = 3.0 / x.ln();
            if s <= scale {
                first.get_or_insert(x);
            } else {
                first = None;
            }
            windows.push(WindowSumRow { delta, x, sum: s, scale });
        }
        bound_holds_from.push((delta, first));
    }

    Ok(DyadicReport {
        selector: PrimeSelector::Dyadic(c.clone()).to_string(),
        sieve_limit: limit,
        blocks,
        partial_sums,
        windows,
        bound_holds_from,
        warnings,
    })
}

/// `Σ_{p<=x} log p / p − log x`.
pub fn mertens_sum(table: &PrimeTable, x: f64) -> Result<f64> {
    table.mertens_sum(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct PntRow {
    pub x: f64,
    /// `π_Q(x) log x / x`.
    pub pnt_ratio: f64,
    /// `Σ_{p ∉ Q, δx < p < x} log p / p`.
    pub complement_window: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PntReport {
    pub selector: String,
    pub delta: f64,
    pub rows: Vec<PntRow>,
    pub trend: TrendAssessment,
    /// Whether the window sums decay, i.e. the prime number theorem for `Q`
    /// is supported at this range.
    pub holds: bool,
}

/// Both prime-number-theorem diagnostics for `Q` at the sample points. The
/// verdict follows the window sums over the complement, judged over the top
/// decade of samples against `bound` (default `3 / log x_last`).
pub fn pnt_check(
    selector: &PrimeSelector,
    delta: f64,
    samples: &[f64],
    table: &PrimeTable,
    bound: Option<f64>,
) -> Result<PntReport> {
    if samples.is_empty() {
        return Err(Error::input("pnt_check needs at least one sample"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("delta must lie in (0,1), got {delta}")));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    if xs[xs.len() - 1] > table.limit() as f64 {
        return Err(Error::range("samples beyond the sieve limit"));
    }
    let member = selector.resolve(table)?;
    let primes = table.primes();
    let complement: Vec<u64> = primes.iter().zip(&member).filter(|(_, &m)| !m).map(|(&p, _)| p).collect();
    let mut selected_prefix = Vec::with_capacity(primes.len() + 1);
    selected_prefix.push(0usize);
    for &m in &member {
        selected_prefix.push(selected_prefix.last().unwrap() + m as usize);
    }
    let rows: Vec<PntRow> = xs
        .iter()
        .map(|&x| {
            let idx = primes.partition_point(|&p| p as f64 <= x);
            PntRow {
                x,
                pnt_ratio: selected_prefix[idx] as f64 * x.ln() / x,
                complement_window: log_weighted(within(&complement, delta * x, x)),
            }
        })
        .collect();
    let last = *xs.last().unwrap();
    let bound = bound.unwrap_or(3.0 / last.ln());
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.x.ln(), r.complement_window)).collect();
    let trend = assess_decay(&points, std::f64::consts::LN_10, bound);
    let holds = trend.verdict == TrendVerdict::Decaying;
    Ok(PntReport { selector: selector.to_string(), delta, rows, trend, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u64) -> PrimeTable {
        PrimeTable::new(n).unwrap()
    }

    #[test]
    fn quotas() {
        assert_eq!(DyadicConstruction::quota(2), 3);
        assert_eq!(DyadicConstruction::quota(4), 3);
        assert_eq!(DyadicConstruction::quota(5), 4);
    }

    #[test]
    fn dyadic_block_four() {
        let t = table(100);
        let c = DyadicConstruction { k0: 4, k_max: Some(4), policy: QuotaPolicy::Strict };
        assert_eq!(c.removed(&t).unwrap(), vec![17, 19, 23]);
        assert!(c.removes(19, &t).unwrap());
        assert!(!c.removes(29, &t).unwrap());
    }

    #[test]
    fn dyadic_strict_quota_failure() {
        let t = table(100);
        let c = DyadicConstruction { k0: 2, k_max: Some(2), policy: QuotaPolicy::Strict };
        match c.removed(&t) {
            Err(Error::Construction { k: 2, quota: 3, available: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let capped = DyadicConstruction { policy: QuotaPolicy::Cap, ..c };
        assert_eq!(capped.removed(&t).unwrap(), vec![5, 7]);
    }

    #[test]
    fn dyadic_empty_when_kmax_below_k0() {
        let t = table(1000);
        let c = DyadicConstruction { k0: 5, k_max: Some(4), policy: QuotaPolicy::Strict };
        assert!(c.removed(&t).unwrap().is_empty());
        let sel = PrimeSelector::Dyadic(c);
        assert!(sel.resolve(&t).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn window_parse_and_display() {
        let c = WindowConstruction::parse("delta=0.5,x=100;10000").unwrap();
        assert_eq!(c.to_string(), "delta=0.5,x=100;10000");
        assert_eq!(WindowConstruction::parse(&c.to_string()).unwrap(), c);
        let d = WindowConstruction::parse("").unwrap();
        assert_eq!(d.sequence, WindowSequence::default());
        assert!(WindowConstruction::parse("delta=0.5,x=100;150").is_err());
        assert!(WindowConstruction::parse("delta=1.5").is_err());
        assert!(WindowConstruction::parse("delta=0.001,base=2,ratio=1.1").is_err());
    }

    #[test]
    fn window_membership() {
        let c = WindowConstruction::parse("delta=0.5").unwrap();
        assert!(c.removes(53));
        assert!(c.removes(97));
        assert!(!c.removes(47));
        assert!(!c.removes(101));
        assert!(c.removes(5003));
    }

    #[test]
    fn window_sum_first_interval() {
        let t = table(1_000_000);
        let c = WindowConstruction::parse("delta=0.5").unwrap();
        let r = construct_windows(&c, &t).unwrap();
        let brute: f64 = [53u64, 59, 61, 67, 71, 73, 79, 83, 89, 97]
            .iter()
            .map(|&p| (p as f64).ln() / p as f64)
            .sum();
        assert_eq!(r.intervals[0].primes, 10);
        assert!((r.intervals[0].window_log_sum - brute).abs() < 1e-14);
        assert_eq!(r.intervals.len(), 2);
        assert!(r.beyond_sieve.is_empty());
    }

    #[test]
    fn empty_window_list() {
        let t = table(10_000);
        let c = WindowConstruction::new(0.5, WindowSequence::Explicit(vec![])).unwrap();
        let r = construct_windows(&c, &t).unwrap();
        assert!(r.intervals.is_empty());
        assert!(r.cumulative_reciprocal.iter().all(|&(_, s)| s == 0.0));
        assert!(PrimeSelector::Windows(c).resolve(&t).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn log_reciprocal_sum_closed_form() {
        let c = WindowConstruction::parse("delta=0.5").unwrap();
        let direct: f64 = (1..60).map(|k| 1.0 / (2f64.powi(k) * 10f64.ln())).sum();
        assert!((c.log_reciprocal_sum() - direct).abs() < 1e-12);
    }

    #[test]
    fn complement_tail_is_bounded_and_shrinks() {
        let c = WindowConstruction::parse("delta=0.1").unwrap();
        let a = c.complement_reciprocal_tail(1_000).unwrap();
        let b = c.complement_reciprocal_tail(100_000_000).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!(b < a);
        // True removed sum in (1e3, 1e4) is about 0.285.
        assert!(a > 0.285);
    }

    #[test]
    fn mertens_window_near_log_two() {
        let t = table(100_000);
        let x = 1e5;
        let window = mertens_sum(&t, x).unwrap() - mertens_sum(&t, x / 2.0).unwrap() + 2f64.ln();
        assert!((window - 2f64.ln()).abs() < 0.1, "{window}");
    }

    #[test]
    fn pnt_for_all_primes() {
        let t = table(1_000_000);
        let r = pnt_check(&PrimeSelector::All, 0.5, &[1e4, 1e5, 1e6], &t, None).unwrap();
        let last = r.rows.last().unwrap();
        assert!((last.pnt_ratio - 78_498.0 * 1e6f64.ln() / 1e6).abs() < 1e-12);
        assert!(r.rows.iter().all(|row| row.complement_window == 0.0));
        assert!(r.holds);
        assert!(pnt_check(&PrimeSelector::All, 0.5, &[], &t, None).is_err());
    }
}
