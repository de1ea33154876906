//! The multiplicative semigroup `K` generated by a prime set `Q`, its counting
//! function, and the density `A = lim π_K(x)/x`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::primes::PrimeTable;
use crate::selector::{ComplementExtent, PrimeSelector};
use crate::sum::KahanSum;

/// Largest bound accepted by the marking sieve (one byte per integer).
pub const MAX_MARKING_BOUND: u64 = 250_000_000;
/// Largest number of elements produced by enumeration.
pub const MAX_ELEMENTS: usize = 250_000_000;
/// Generator lists up to this size are enumerated instead of sieved.
const ENUMERATION_MAX_GENERATORS: usize = 32;
const MARK_CHUNK: usize = 1 << 20;

/// Default threshold below which the Panejah ratio counts as vanishing.
pub const PANEJAH_THRESHOLD: f64 = 1e-3;
/// Sieve bound for Euler products whose complement is infinite.
pub const DEFAULT_MAX_EULER_PRIME: u64 = 10_000_000;
/// Largest finite complement handled by sieving.
const MAX_FINITE_COMPLEMENT: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerationMethod {
    /// Cross out multiples of every non-generating prime.
    MarkingSieve,
    /// Multiply out a short generator list.
    Enumeration,
}

#[derive(Clone, Debug)]
pub struct Semigroup {
    bound: u64,
    elements: Vec<u64>,
    selector: PrimeSelector,
    complementary: bool,
    trivial: bool,
    method: GenerationMethod,
    logs: OnceLock<Vec<f64>>,
}

impl Semigroup {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Elements `<= bound`, ascending, starting with 1.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn selector(&self) -> &PrimeSelector {
        &self.selector
    }

    /// True when `K` is generated by `ℙ ∖ Q` rather than by `Q`.
    pub fn is_complementary(&self) -> bool {
        self.complementary
    }

    /// True when no prime generates `K`, so `K = {1}` beyond any bound.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn method(&self) -> GenerationMethod {
        self.method
    }

    /// `log n` for every element, computed once.
    pub fn logs(&self) -> &[f64] {
        self.logs.get_or_init(|| self.elements.iter().map(|&n| (n as f64).ln()).collect())
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    /// `π_K(x) = #{n ∈ K : n <= x}` for `x <= bound` (0 below 1).
    pub fn count(&self, x: f64) -> Result<usize> {
        if x.is_nan() {
            return Err(Error::input("count at NaN"));
        }
        if x > self.bound as f64 {
            return Err(Error::range(format!(
                "π_K({x}) requested but K is generated only up to {}",
                self.bound
            )));
        }
        if x < 1.0 {
            return Ok(0);
        }
        let xi = x.floor() as u64;
        Ok(self.elements.partition_point(|&n| n <= xi))
    }

    /// `(x, π_K(x)/x)` at powers of ten up to the bound, and at the bound.
    pub fn empirical_density(&self) -> Vec<(f64, f64)> {
        let mut xs = Vec::new();
        let mut x = 10u64;
        while x < self.bound {
            xs.push(x);
            x = x.saturating_mul(10);
        }
        xs.push(self.bound);
        xs.into_iter()
            .map(|x| (x as f64, self.elements.partition_point(|&n| n <= x) as f64 / x as f64))
            .collect()
    }
}

/// Generators known without a sieve, when `K` is generated by a short list.
fn explicit_generators(selector: &PrimeSelector, complementary: bool, x: u64) -> Option<Vec<u64>> {
    let keep = |v: &[u64]| v.iter().copied().filter(|&p| p <= x).collect::<Vec<_>>();
    match (selector, complementary) {
        (PrimeSelector::Include(v) | PrimeSelector::File { primes: v, .. }, false) => Some(keep(v)),
        (PrimeSelector::All, true) | (PrimeSelector::Residue { m: 1, .. }, true) => Some(Vec::new()),
        (PrimeSelector::Exclude(v), true) => Some(keep(v)),
        (PrimeSelector::Residue { a: 1, m: 2 }, true) => Some(keep(&[2])),
        _ => None,
    }
}

fn structurally_trivial(selector: &PrimeSelector, complementary: bool) -> bool {
    match (selector, complementary) {
        (PrimeSelector::Include(v) | PrimeSelector::File { primes: v, .. }, false) => v.is_empty(),
        (PrimeSelector::Exclude(v), true) => v.is_empty(),
        (PrimeSelector::All, true) | (PrimeSelector::Residue { m: 1, .. }, true) => true,
        _ => false,
    }
}

fn enumerate(generators: &[u64], x: u64) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for &p in generators {
        let existing = out.len();
        for i in 0..existing {
            let mut v = out[i];
            while let Some(next) = v.checked_mul(p).filter(|&n| n <= x) {
                out.push(next);
                v = next;
            }
            if out.len() > MAX_ELEMENTS {
                return Err(Error::range(format!("more than {MAX_ELEMENTS} elements below {x}")));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn marking_sieve(blockers: &[u64], x: u64, exec: Execution) -> Vec<u64> {
    let mut marks = vec![true; x as usize + 1];
    exec.for_each_chunk_mut(&mut marks, MARK_CHUNK, |ci, chunk| {
        let lo = (ci * MARK_CHUNK) as u64;
        let hi = lo + chunk.len() as u64 - 1;
        for &p in blockers {
            if p > hi {
                break;
            }
            let mut m = lo.div_ceil(p).max(1) * p;
            while m <= hi {
                chunk[(m - lo) as usize] = false;
                m += p;
            }
        }
    });
    marks[0] = false;
    marks
        .iter()
        .enumerate()
        .filter(|(_, &keep)| keep)
        .map(|(n, _)| n as u64)
        .collect()
}

fn build(selector: &PrimeSelector, x: u64, complementary: bool, exec: Execution) -> Result<Semigroup> {
    if x < 1 {
        return Err(Error::input("semigroup bound must be at least 1"));
    }
    let finish = |elements, method| Semigroup {
        bound: x,
        elements,
        selector: selector.clone(),
        complementary,
        trivial: structurally_trivial(selector, complementary),
        method,
        logs: OnceLock::new(),
    };
    if let Some(gens) = explicit_generators(selector, complementary, x) {
        if gens.len() <= ENUMERATION_MAX_GENERATORS {
            return Ok(finish(enumerate(&gens, x)?, GenerationMethod::Enumeration));
        }
    }
    if x > MAX_MARKING_BOUND {
        return Err(Error::range(format!(
            "bound {x} exceeds the sieve capacity {MAX_MARKING_BOUND}"
        )));
    }
    let table = PrimeTable::with_execution(x, exec)?;
    let member = selector.resolve(&table)?;
    let (gens, blockers): (Vec<u64>, Vec<u64>) = {
        let mut g = Vec::new();
        let mut b = Vec::new();
        for (&p, &m) in table.primes().iter().zip(&member) {
            if m != complementary {
                g.push(p);
            } else {
                b.push(p);
            }
        }
        (g, b)
    };
    if gens.len() <= ENUMERATION_MAX_GENERATORS {
        return Ok(finish(enumerate(&gens, x)?, GenerationMethod::Enumeration));
    }
    Ok(finish(marking_sieve(&blockers, x, exec), GenerationMethod::MarkingSieve))
}

/// `K = {n <= x : every prime factor of n lies in Q}`, including 1.
pub fn generate(selector: &PrimeSelector, x: u64) -> Result<Semigroup> {
    build(selector, x, false, Execution::default())
}

pub fn generate_with(selector: &PrimeSelector, x: u64, exec: Execution) -> Result<Semigroup> {
    build(selector, x, false, exec)
}

/// `J = {n <= x : no prime factor of n lies in Q}`, the semigroup of the complement.
pub fn generate_complementary(selector: &PrimeSelector, x: u64, exec: Execution) -> Result<Semigroup> {
    build(selector, x, true, exec)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub selector: String,
    /// `A = 1/ζ_J(1) = Π_{p ∉ Q} (1 − 1/p)`.
    #[serde(rename = "A")]
    pub density: f64,
    /// Bound on `|log A_computed − log A|`. When the product diverges, `A` is
    /// reported as 0 and this field holds the last partial product, which
    /// dominates the true value.
    pub euler_tail_bound: f64,
    /// Largest complement prime entering the product.
    pub primes_up_to: u64,
    pub certified: bool,
    pub divergent: bool,
    pub empirical: Vec<(f64, f64)>,
}

impl DensityReport {
    pub fn with_empirical(mut self, k: &Semigroup) -> Self {
        self.empirical = k.empirical_density();
        self
    }
}

fn log_product(primes: impl Iterator<Item = u64>) -> f64 {
    primes.map(|p| (-1.0 / p as f64).ln_1p()).collect::<KahanSum>().value()
}

/// The density of `K`, as the Euler product of the complement.
pub fn density(selector: &PrimeSelector, precision: f64) -> Result<DensityReport> {
    density_with(selector, precision, DEFAULT_MAX_EULER_PRIME, Execution::default())
}

pub fn density_with(
    selector: &PrimeSelector,
    precision: f64,
    max_prime: u64,
    exec: Execution,
) -> Result<DensityReport> {
    if !(precision > 0.0) {
        return Err(Error::input("precision must be positive"));
    }
    let report = |density, euler_tail_bound, primes_up_to, certified, divergent| DensityReport {
        selector: selector.to_string(),
        density,
        euler_tail_bound,
        primes_up_to,
        certified,
        divergent,
        empirical: Vec::new(),
    };
    let complement_product = |p0: u64| -> Result<f64> {
        let table = PrimeTable::with_execution(p0, exec)?;
        let member = selector.resolve(&table)?;
        Ok(log_product(
            table.primes().iter().zip(&member).filter(|(_, &m)| !m).map(|(&p, _)| p),
        ))
    };
    match selector.complement_extent() {
        ComplementExtent::Finite { max } => {
            let log_a = match selector {
                PrimeSelector::Exclude(v) => log_product(v.iter().copied()),
                _ if max < 2 => 0.0,
                _ => {
                    if max > MAX_FINITE_COMPLEMENT {
                        return Err(Error::range(format!(
                            "finite complement reaches {max}, beyond {MAX_FINITE_COMPLEMENT}"
                        )));
                    }
                    complement_product(max)?
                }
            };
            Ok(report(log_a.exp(), 0.0, max, true, false))
        }
        ComplementExtent::Convergent => {
            let mut p0 = 1000u64.min(max_prime);
            let mut tail = selector.complement_log_tail(p0, 1.0).unwrap_or(f64::INFINITY);
            while tail > precision && p0 < max_prime {
                p0 = (p0 * 10).min(max_prime);
                tail = selector.complement_log_tail(p0, 1.0).unwrap_or(f64::INFINITY);
            }
            let log_a = complement_product(p0)?;
            Ok(report(log_a.exp(), tail, p0, tail <= precision, false))
        }
        ComplementExtent::Divergent => {
            let partial = complement_product(max_prime)?.exp();
            Ok(report(0.0, partial, max_prime, false, true))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PanejahReport {
    pub delta: f64,
    pub threshold: f64,
    /// `(x, (π_K(x) − π_K(δx))/x)`, ascending in `x`.
    pub ratios: Vec<(f64, f64)>,
    /// Minimum ratio over the upper half of the sorted samples.
    pub top_half_min: f64,
    pub passed: bool,
}

/// Finite surrogate for `liminf (π_K(x) − π_K(δx))/x > 0`: passes when the
/// ratios over the upper half of the samples all exceed [`PANEJAH_THRESHOLD`].
pub fn panejah_check(k: &Semigroup, delta: f64, samples: &[f64]) -> Result<PanejahReport> {
    panejah_check_with(k, delta, samples, PANEJAH_THRESHOLD)
}

pub fn panejah_check_with(k: &Semigroup, delta: f64, samples: &[f64], threshold: f64) -> Result<PanejahReport> {
    if samples.is_empty() {
        return Err(Error::input("panejah check needs at least one sample"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("delta must lie in (0,1), got {delta}")));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    if xs[0] <= 1.0 || xs[xs.len() - 1] > k.bound() as f64 {
        return Err(Error::range(format!("samples must lie in (1, {}]", k.bound())));
    }
    let ratios = xs
        .iter()
        .map(|&x| Ok((x, (k.count(x)? - k.count(delta * x)?) as f64 / x)))
        .collect::<Result<Vec<_>>>()?;
    let top_half_min = ratios[ratios.len() / 2..]
        .iter()
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    Ok(PanejahReport { delta, threshold, ratios, top_half_min, passed: top_half_min > threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(s: &str) -> PrimeSelector {
        PrimeSelector::parse(s).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(generate(&sel("exclude:2"), 10).unwrap().elements(), &[1, 3, 5, 7, 9]);
        assert_eq!(
            generate(&sel("include:2,3"), 20).unwrap().elements(),
            &[1, 2, 3, 4, 6, 8, 9, 12, 16, 18]
        );
        assert_eq!(generate(&sel("all"), 10).unwrap().elements(), &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(generate(&sel("include:"), 100).unwrap().elements(), &[1]);
        assert!(generate(&sel("all"), 0).is_err());
    }

    #[test]
    fn counting() {
        let odd = generate(&sel("exclude:2"), 10).unwrap();
        assert_eq!(odd.count(6.0).unwrap(), 3);
        assert_eq!(odd.count(0.5).unwrap(), 0);
        assert!(odd.count(11.0).is_err());
        let smooth = generate(&sel("include:2,3"), 20).unwrap();
        assert_eq!(smooth.count(9.0).unwrap(), 7);
        assert_eq!(generate(&sel("all"), 10).unwrap().count(10.0).unwrap(), 10);
    }

    #[test]
    fn methods_agree() {
        let a = generate(&sel("include:2,3,5,7"), 100_000).unwrap();
        assert_eq!(a.method(), GenerationMethod::Enumeration);
        let b = generate_complementary(&sel("exclude:2,3,5,7"), 100_000, Execution::Sequential).unwrap();
        assert_eq!(a.elements(), b.elements());
        let c = generate(&sel("mod:1,4"), 100_000).unwrap();
        assert_eq!(c.method(), GenerationMethod::MarkingSieve);
        let d = generate_with(&sel("mod:1,4"), 100_000, Execution::Sequential).unwrap();
        assert_eq!(c.elements(), d.elements());
    }

    #[test]
    fn densities() {
        let d = |s: &str| density(&sel(s), 1e-9).unwrap();
        assert!((d("exclude:2").density - 0.5).abs() < 1e-15);
        assert!((d("exclude:2,3").density - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d("all").density, 1.0);
        assert!((d("mod:1,2").density - 0.5).abs() < 1e-15);
        let div = density_with(&sel("include:2,3"), 1e-6, 100_000, Execution::default()).unwrap();
        assert!(div.divergent && div.density == 0.0);
        assert!(div.euler_tail_bound > 0.1 && div.euler_tail_bound < 0.2);
        assert!(density(&sel("all"), 0.0).is_err());
    }

    #[test]
    fn window_construction_density_is_positive() {
        let r = density_with(&sel("construct:6a:delta=0.5"), 1e-3, 1_000_000, Execution::default()).unwrap();
        assert!(!r.divergent);
        assert!(r.density > 0.5 && r.density < 1.0);
        assert!(r.euler_tail_bound.is_finite());
    }

    #[test]
    fn panejah_examples() {
        let n = generate(&sel("all"), 1_000_000).unwrap();
        let r = panejah_check(&n, 0.5, &[1e6]).unwrap();
        assert_eq!(r.ratios[0].1, 0.5);
        assert!(r.passed);
        let pow2 = generate(&sel("include:2"), 1_000_000).unwrap();
        let r = panejah_check(&pow2, 0.5, &[1e6]).unwrap();
        assert_eq!(r.ratios[0].1, 1e-6);
        assert!(!r.passed);
        assert!(panejah_check(&n, 0.5, &[]).is_err());
        assert!(panejah_check(&n, 0.5, &[2e6]).is_err());
    }
}
