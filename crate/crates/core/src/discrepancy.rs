//! Explicit counting-function envelopes `|π_K(u) − A u| <= D(u)` with
//! `D(u) = scale · (1 + log u)^power`, and the tail estimates they imply.
//!
//! Such an envelope turns the sum over `n > N` into `A ∫_N^∞` plus a remainder
//! controlled by partial summation.

use serde::Serialize;

use crate::selector::PrimeSelector;

/// Largest generator or exclusion list for which an envelope is derived.
const MAX_LISTED: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityModel {
    /// Asymptotic density `A` of `K`.
    pub density: f64,
    pub scale: f64,
    pub power: u32,
}

impl DensityModel {
    pub fn new(density: f64, scale: f64, power: u32) -> Self {
        DensityModel { density, scale, power }
    }

    /// Envelope for selectors whose counting function is known in closed form:
    /// integers coprime to finitely many primes (inclusion–exclusion gives
    /// `D = 2^|F|`) and smooth numbers over finitely many primes (`A = 0` and
    /// `π_K(u) <= Π_p (1 + log u / log p)`).
    pub fn for_selector(selector: &PrimeSelector) -> Option<Self> {
        let excluded = |f: &[u64]| -> Option<Self> {
            if f.len() > MAX_LISTED {
                return None;
            }
            let a = f.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
            Some(DensityModel::new(a, 2f64.powi(f.len() as i32), 0))
        };
        match selector {
            PrimeSelector::All => Some(DensityModel::new(1.0, 1.0, 0)),
            PrimeSelector::Exclude(f) => excluded(f),
            PrimeSelector::Residue { m: 1, .. } => Some(DensityModel::new(1.0, 1.0, 0)),
            PrimeSelector::Residue { a: 1, m: 2 } => excluded(&[2]),
            PrimeSelector::Include(q) | PrimeSelector::File { primes: q, .. } => {
                if q.len() > MAX_LISTED {
                    return None;
                }
                let scale = q.iter().map(|&p| (1.0 / (p as f64).ln()).max(1.0)).product();
                Some(DensityModel::new(0.0, scale, q.len() as u32))
            }
            _ => None,
        }
    }

    /// `D(u)`.
    pub fn envelope(&self, u: f64) -> f64 {
        self.scale * (1.0 + u.max(1.0).ln()).powi(self.power as i32)
    }

    /// `∫_N^∞ D(u) u^{−σ−1} du` in closed form (`σ > 0`).
    pub fn weighted_tail(&self, n: f64, sigma: f64) -> f64 {
        let l = 1.0 + n.max(1.0).ln();
        let p = self.power;
        let (mut term, mut sum, mut fact) = (1.0, 1.0, 1.0);
        for k in 1..=p {
            term *= sigma * l / k as f64;
            sum += term;
            fact *= k as f64;
        }
        self.scale * n.powf(-sigma) * fact * sigma.powi(-(p as i32 + 1)) * sum
    }

    /// Bound on `|Σ_{n∈K, n>N} n^{−s} − A N^{1−s}/(s−1)|`.
    pub fn zeta_remainder(&self, n: f64, sigma: f64, abs_s: f64) -> f64 {
        self.envelope(n) * n.powf(-sigma) + abs_s * self.weighted_tail(n, sigma)
    }
}
