//! Declarative prime subsets `Q ⊂ ℙ` and the CLI selector mini-language.
//!
//! | syntax                     | meaning                                        |
//! |----------------------------|------------------------------------------------|
//! | `all`                      | every prime                                    |
//! | `exclude:2,3`              | every prime except the listed ones             |
//! | `include:2,3,5`            | exactly the listed primes (`include:` is `∅`)   |
//! | `mod:1,4`                  | primes `p ≡ 1 (mod 4)`                          |
//! | `file:PATH`                | newline-separated primes read from `PATH`      |
//! | `construct:6a:k=v,...`     | complement of a sparse union of prime windows  |
//! | `construct:6b:k=v,...`     | complement of the first primes of dyadic blocks|

use std::fmt;
use std::path::{Path, PathBuf};

use crate::constructions::{DyadicConstruction, WindowConstruction};
use crate::error::{Error, Result};
use crate::primes::{is_prime_trial, PrimeTable};

#[derive(Clone, Debug, PartialEq)]
pub enum PrimeSelector {
    All,
    Exclude(Vec<u64>),
    Include(Vec<u64>),
    Residue { a: u64, m: u64 },
    File { path: PathBuf, primes: Vec<u64> },
    Windows(WindowConstruction),
    Dyadic(DyadicConstruction),
}

/// How large the complement `ℙ ∖ Q` is, as far as `Σ 1/p` is concerned.
#[derive(Clone, Debug, PartialEq)]
pub enum ComplementExtent {
    /// Finitely many complement primes, all `<= max`.
    Finite { max: u64 },
    /// Infinite, but `Σ 1/p` converges with a structural tail bound.
    Convergent,
    /// `Σ_{p ∉ Q} 1/p = ∞`.
    Divergent,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    let mut v = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let n: u64 = tok
            .parse()
            .map_err(|_| Error::input(format!("`{tok}` is not a non-negative integer")))?;
        v.push(n);
    }
    Ok(v)
}

fn checked_primes(mut v: Vec<u64>) -> Result<Vec<u64>> {
    if let Some(&bad) = v.iter().find(|&&p| !is_prime_trial(p)) {
        return Err(Error::input(format!("{bad} is not prime")));
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl PrimeSelector {
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "all" {
            return Ok(PrimeSelector::All);
        }
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::input(format!("unrecognised selector `{spec}`")))?;
        match kind {
            "exclude" => Ok(PrimeSelector::Exclude(checked_primes(parse_list(rest)?)?)),
            "include" => Ok(PrimeSelector::Include(checked_primes(parse_list(rest)?)?)),
            "mod" => {
                let v = parse_list(rest)?;
                let [a, m] = v[..] else {
                    return Err(Error::input("mod selector needs `mod:a,m`"));
                };
                if m == 0 {
                    return Err(Error::input("modulus must be positive"));
                }
                Ok(PrimeSelector::Residue { a: a % m, m })
            }
            "file" => Self::from_file(rest),
            "construct" => {
                let (which, params) = rest.split_once(':').unwrap_or((rest, ""));
                match which {
                    "6a" => Ok(PrimeSelector::Windows(WindowConstruction::parse(params)?)),
                    "6b" => Ok(PrimeSelector::Dyadic(DyadicConstruction::parse(params)?)),
                    _ => Err(Error::input(format!("unknown construction `{which}`"))),
                }
            }
            _ => Err(Error::input(format!("unrecognised selector kind `{kind}`"))),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        let mut v = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: u64 = line.parse().map_err(|_| {
                Error::input(format!("{}:{}: `{line}` is not an integer", path.display(), i + 1))
            })?;
            v.push(p);
        }
        Ok(PrimeSelector::File { path: path.to_path_buf(), primes: checked_primes(v)? })
    }

    /// The generating primes, when `Q` is a finite explicit list.
    pub fn finite_generators(&self) -> Option<&[u64]> {
        match self {
            PrimeSelector::Include(v) | PrimeSelector::File { primes: v, .. } => Some(v),
            _ => None,
        }
    }

    /// Whether `p` (assumed prime) belongs to `Q`. Dyadic constructions need
    /// the prime table to know which primes open each block.
    pub fn contains(&self, p: u64, table: &PrimeTable) -> Result<bool> {
        Ok(match self {
            PrimeSelector::All => true,
            PrimeSelector::Exclude(v) => v.binary_search(&p).is_err(),
            PrimeSelector::Include(v) | PrimeSelector::File { primes: v, .. } => {
                v.binary_search(&p).is_ok()
            }
            PrimeSelector::Residue { a, m } => p % m == *a,
            PrimeSelector::Windows(c) => !c.removes(p),
            PrimeSelector::Dyadic(c) => !c.removes(p, table)?,
        })
    }

    /// Membership of every prime in `table`, aligned with `table.primes()`.
    pub fn resolve(&self, table: &PrimeTable) -> Result<Vec<bool>> {
        if let PrimeSelector::Dyadic(c) = self {
            return c.resolve(table);
        }
        table.primes().iter().map(|&p| self.contains(p, table)).collect()
    }

    pub fn complement_extent(&self) -> ComplementExtent {
        match self {
            PrimeSelector::All => ComplementExtent::Finite { max: 1 },
            PrimeSelector::Exclude(v) => ComplementExtent::Finite { max: v.last().copied().unwrap_or(1) },
            PrimeSelector::Include(_) | PrimeSelector::File { .. } => ComplementExtent::Divergent,
            PrimeSelector::Residue { a, m } => {
                // Only moduli with a single coprime class leave a finite complement.
                if *m <= 2 && gcd(*a, *m) == 1 {
                    ComplementExtent::Finite { max: *m }
                } else {
                    ComplementExtent::Divergent
                }
            }
            PrimeSelector::Windows(_) => ComplementExtent::Convergent,
            PrimeSelector::Dyadic(c) => match c.k_max {
                Some(k) => ComplementExtent::Finite { max: 1u64 << (k + 1).min(63) },
                None => ComplementExtent::Divergent,
            },
        }
    }

    /// Certified upper bound on `Σ_{p ∉ Q, p > p0} 1/(p^σ − 1)`, which dominates
    /// the log-tail of the complementary Euler product. `None` means the tail
    /// cannot be bounded (divergent at σ = 1).
    pub fn complement_log_tail(&self, p0: u64, sigma: f64) -> Option<f64> {
        match self.complement_extent() {
            ComplementExtent::Finite { max } if max <= p0 => return Some(0.0),
            _ => {}
        }
        if sigma > 1.0 {
            // Over all integers n > p0: 1/(n^σ − 1) <= 2 n^{-σ} once n^σ >= 2,
            // and Σ_{n>p0} n^{-σ} <= p0^{1-σ}/(σ-1).
            let p0 = p0.max(2) as f64;
            return Some(2.0 * p0.powf(1.0 - sigma) / (sigma - 1.0));
        }
        match self {
            PrimeSelector::Windows(c) => c.complement_reciprocal_tail(p0),
            _ => None,
        }
    }
}

impl fmt::Display for PrimeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSelector::All => write!(f, "all"),
            PrimeSelector::Exclude(v) => write!(f, "exclude:{}", join(v)),
            PrimeSelector::Include(v) => write!(f, "include:{}", join(v)),
            PrimeSelector::Residue { a, m } => write!(f, "mod:{a},{m}"),
            PrimeSelector::File { path, .. } => write!(f, "file:{}", path.display()),
            PrimeSelector::Windows(c) => write!(f, "construct:6a:{c}"),
            PrimeSelector::Dyadic(c) => write!(f, "construct:6b:{c}"),
        }
    }
}

impl std::str::FromStr for PrimeSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrimeSelector::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        for s in ["all", "exclude:2,3", "include:2,3,5", "include:", "mod:1,4"] {
            let sel = PrimeSelector::parse(s).unwrap();
            assert_eq!(sel.to_string(), s);
        }
        assert_eq!(PrimeSelector::parse("mod:5,4").unwrap(), PrimeSelector::Residue { a: 1, m: 4 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PrimeSelector::parse("exclude:4").is_err());
        assert!(PrimeSelector::parse("include:2,x").is_err());
        assert!(PrimeSelector::parse("mod:1").is_err());
        assert!(PrimeSelector::parse("mod:1,0").is_err());
        assert!(PrimeSelector::parse("nothing").is_err());
        assert!(PrimeSelector::parse("file:/definitely/not/here").is_err());
    }

    #[test]
    fn complement_classes() {
        use ComplementExtent::*;
        let p = |s| PrimeSelector::parse(s).unwrap().complement_extent();
        assert_eq!(p("all"), Finite { max: 1 });
        assert_eq!(p("exclude:2,3"), Finite { max: 3 });
        assert_eq!(p("mod:1,2"), Finite { max: 2 });
        assert_eq!(p("mod:1,4"), Divergent);
        assert_eq!(p("mod:0,2"), Divergent);
        assert_eq!(p("include:2"), Divergent);
    }

    #[test]
    fn resolves_membership() {
        let t = PrimeTable::new(20).unwrap();
        let r = PrimeSelector::parse("mod:1,4").unwrap().resolve(&t).unwrap();
        let chosen: Vec<u64> = t.primes().iter().zip(&r).filter(|(_, &b)| b).map(|(&p, _)| p).collect();
        assert_eq!(chosen, vec![5, 13, 17]);
    }

    #[test]
    fn file_selector() {
        let dir = std::env::temp_dir().join(format!("modzeta-sel-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("good.txt");
        std::fs::write(&good, "2\n# comment\n7\n\n3\n").unwrap();
        let sel = PrimeSelector::parse(&format!("file:{}", good.display())).unwrap();
        assert_eq!(sel.finite_generators(), Some(&[2, 3, 7][..]));
        let bad = dir.join("bad.txt");
        std::fs::write(&bad, "2\n9\n").unwrap();
        assert!(PrimeSelector::from_file(&bad).is_err());
    }
}
