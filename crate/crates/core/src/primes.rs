//! Segmented sieve of Eratosthenes and a sorted prime table.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sum::KahanSum;

/// Largest sieve bound accepted. Keeps the table comfortably inside memory.
pub const MAX_SIEVE_LIMIT: u64 = 4_000_000_000;

const SEGMENT: u64 = 1 << 18;

/// All primes `p <= limit`, ascending.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

fn small_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_execution(limit, Execution::default())
    }

    pub fn with_execution(limit: u64, exec: Execution) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::range(format!(
                "sieve limit {limit} exceeds the supported maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        if limit < 2 {
            return Ok(PrimeTable { limit, primes: Vec::new() });
        }
        let root = (limit as f64).sqrt() as u64 + 1;
        let base = small_sieve(root.min(limit));
        if root >= limit {
            return Ok(PrimeTable { limit, primes: base.into_iter().filter(|&p| p <= limit).collect() });
        }

        let start = root + 1;
        let nseg = (limit - start + 1).div_ceil(SEGMENT) as usize;
        let segments = exec.map_range(nseg, |s| {
            let lo = start + s as u64 * SEGMENT;
            let hi = (lo + SEGMENT - 1).min(limit);
            let mut composite = vec![false; (hi - lo + 1) as usize];
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut m = lo.div_ceil(p) * p;
                if m < p * p {
                    m = p * p;
                }
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64)
                .collect::<Vec<_>>()
        });

        let mut primes = base;
        primes.extend(segments.into_iter().flatten());
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n > self.limit {
            return Err(Error::range(format!("{n} is beyond the sieve limit {}", self.limit)));
        }
        Ok(self.primes.binary_search(&n).is_ok())
    }

    /// Number of primes `p <= x`.
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    /// Primes in the half-open range `lo < p <= hi`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p <= lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }

    /// Primes strictly inside the real interval `(lo, hi)`.
    pub fn open_interval(&self, lo: f64, hi: f64) -> &[u64] {
        let a = self.primes.partition_point(|&p| (p as f64) <= lo);
        let b = self.primes.partition_point(|&p| (p as f64) < hi);
        &self.primes[a..b.max(a)]
    }

    /// `Σ_{p <= x} log p / p − log x`.
    pub fn mertens_sum(&self, x: f64) -> Result<f64> {
        if !(x >= 2.0) || x > self.limit as f64 {
            return Err(Error::range(format!(
                "mertens sum at x = {x} needs 2 <= x <= {}",
                self.limit
            )));
        }
        let s: KahanSum = self
            .primes
            .iter()
            .take_while(|&&p| p as f64 <= x)
            .map(|&p| (p as f64).ln() / p as f64)
            .collect();
        Ok(s.value() - x.ln())
    }
}

/// Trial-division primality; used for spot checks and invariants.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert!(PrimeTable::new(1).unwrap().primes().is_empty());
        assert_eq!(PrimeTable::new(2).unwrap().primes(), &[2]);
        assert_eq!(PrimeTable::new(30).unwrap().primes(), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn segmented_matches_trial_division() {
        let t = PrimeTable::new(300_000).unwrap();
        let brute: Vec<u64> = (0..=300_000).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(t.primes(), brute.as_slice());
    }

    #[test]
    fn prime_counts() {
        let t = PrimeTable::new(1_000_000).unwrap();
        assert_eq!(t.pi(1_000_000), 78_498);
        assert_eq!(t.pi(100), 25);
        assert_eq!(t.range(50, 100), &[53, 59, 61, 67, 71, 73, 79, 83, 89, 97]);
        assert_eq!(t.open_interval(16.0, 32.0), &[17, 19, 23, 29, 31]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = PrimeTable::with_execution(2_000_000, Execution::Sequential).unwrap();
        let b = PrimeTable::with_execution(2_000_000, Execution::Parallel).unwrap();
        assert_eq!(a.primes(), b.primes());
    }

    #[test]
    fn mertens_single_prime() {
        let t = PrimeTable::new(10).unwrap();
        let v = t.mertens_sum(2.0).unwrap();
        assert!((v + std::f64::consts::LN_2 / 2.0).abs() < 1e-15);
        assert!(t.mertens_sum(11.0).is_err());
    }

    #[test]
    fn beyond_limit_is_rejected() {
        assert!(PrimeTable::new(MAX_SIEVE_LIMIT + 1).is_err());
        assert!(PrimeTable::new(10).unwrap().is_prime(11).is_err());
    }
}
