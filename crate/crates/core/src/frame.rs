//! Discretisation of `Z_{K,I}` on `L²(−T, T)` in the orthonormal basis
//! `φ_j(t) = e^{iπjt/T}/√(2T)`, `|j| <= (M−1)/2`.
//!
//! With `c_j(ξ) = ⟨e^{iξ·}, φ_j⟩ = √(2T) sinc(Tξ − πj)` the matrix is
//! `(1/2π) Σ_{n∈K, n<=N} (1/n) [c(log n) c(log n)ᵀ + c(−log n) c(−log n)ᵀ]`.
//! Every `c_j` is real, so the matrix is real symmetric. Writing
//! `x = Tξ`, `sin(x − πj) = (−1)^j sin x` and partial fractions reduce the
//! off-diagonal sums to `M` scalar sums per branch.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::discrepancy::DensityModel;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::semigroup::Semigroup;
use crate::special::{cin, si};
use crate::zeta::density_model;

const BLOCK: usize = 1 << 14;
const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;
/// Largest supported basis size.
pub const MAX_DIM: usize = 1025;
/// Clustering tolerances reported by [`spectrum`].
pub const CLUSTER_EPS: [f64; 3] = [0.05, 0.1, 0.2];
const HISTOGRAM_BIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalSpec {
    /// Half-length `T` of `I = (−T, T)`.
    pub t: f64,
}

impl IntervalSpec {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::input(format!("T must be positive, got {t}")));
        }
        Ok(IntervalSpec { t })
    }
}

/// Treatment of the terms `n > N`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum FrameTail {
    /// Density model when one is known for `K`, else truncation.
    #[default]
    Auto,
    /// Drop the terms; the bound covers any `K ⊂ ℕ`.
    Truncate,
    /// Replace them by `A ∫_{|ξ| > log N} c cᵀ dξ / 2π`.
    Density(DensityModel),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FrameOptions {
    pub tail: FrameTail,
    pub exec: Execution,
}

#[derive(Clone, Debug)]
pub struct FrameMatrix {
    pub interval: IntervalSpec,
    pub dim: usize,
    pub cutoff: u64,
    /// The truncated sum over `n <= N`.
    pub raw: DMatrix<f64>,
    /// `raw` plus the tail model, if any.
    pub matrix: DMatrix<f64>,
    pub tail_model: Option<DensityModel>,
    /// Bound on the operator norm of the remaining error.
    pub tail_bound: f64,
    /// `max |a_jk − a_kj| / max |a_jk|` of `raw`.
    pub symmetry_defect: f64,
    pub raw_min_eigenvalue: f64,
    pub raw_max_eigenvalue: f64,
}

impl FrameMatrix {
    /// Smallest eigenvalue of `raw` is at least `−tol · λ_max`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.raw_min_eigenvalue >= -tol * self.raw_max_eigenvalue.max(0.0)
    }
}

/// `max(10^6, e^{2πM/T})`, capped by the semigroup bound.
pub fn default_cutoff(m: usize, t: f64, bound: u64) -> u64 {
    let e = 2.0 * PI * m as f64 / t;
    let n = if e > 60.0 { u64::MAX } else { (e.exp() as u64).max(1_000_000) };
    n.min(bound)
}

fn half_width(m: usize) -> Result<i64> {
    if m.is_multiple_of(2) || m == 0 || m > MAX_DIM {
        return Err(Error::input(format!("basis size must be odd and at most {MAX_DIM}, got {m}")));
    }
    Ok(((m - 1) / 2) as i64)
}

fn sign(j: i64) -> f64 {
    if j.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Per-index sums `U_j = Σ (1/n) sin²x / (±x − πj)` and
/// `V_j = Σ (1/n) sinc²(±x − πj)` over both branches, `x = T log n`.
fn branch_sums(logs: &[f64], elems: &[u64], t: f64, h: i64, exec: Execution) -> (Vec<f64>, Vec<f64>) {
    let m = (2 * h + 1) as usize;
    let partials = exec.map_blocks(logs.len(), BLOCK, |r| {
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; m];
        for i in r {
            let x = t * logs[i];
            let w = 1.0 / elems[i] as f64;
            let s = x.sin();
            let s2 = s * s;
            for (idx, j) in (-h..=h).enumerate() {
                let b = PI * j as f64;
                for d in [x - b, -x - b] {
                    if d == 0.0 {
                        v[idx] += w;
                    } else {
                        let q = s2 / d;
                        u[idx] += w * q;
                        v[idx] += w * q / d;
                    }
                }
            }
        }
        (u, v)
    });
    let mut u = vec![crate::sum::KahanSum::new(); m];
    let mut v = vec![crate::sum::KahanSum::new(); m];
    for (pu, pv) in &partials {
        for i in 0..m {
            u[i].add(pu[i]);
            v[i].add(pv[i]);
        }
    }
    (u.iter().map(|k| k.value()).collect(), v.iter().map(|k| k.value()).collect())
}

/// `∫ sin²u / u du = ½ Cin(2u)`.
fn g(u: f64) -> f64 {
    0.5 * cin(2.0 * u)
}

/// `∫ sin²u / u² du = Si(2u) − sin²u / u`.
fn h(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        let s = u.sin();
        si(2.0 * u) - s * s / u
    }
}

/// Gram matrix `∫ c_j c_k dξ` over a union of intervals `[α, β]` given in
/// `x = Tξ` units.
fn gram(intervals: &[(f64, f64)], hw: i64) -> DMatrix<f64> {
    let m = (2 * hw + 1) as usize;
    let mut gs = vec![0.0; m];
    let mut hs = vec![0.0; m];
    for (idx, j) in (-hw..=hw).enumerate() {
        let b = PI * j as f64;
        let (mut gsum, mut hsum) = (crate::sum::KahanSum::new(), crate::sum::KahanSum::new());
        for &(lo, hi) in intervals {
            gsum.add(g(hi - b) - g(lo - b));
            hsum.add(h(hi - b) - h(lo - b));
        }
        gs[idx] = gsum.value();
        hs[idx] = hsum.value();
    }
    DMatrix::from_fn(m, m, |a, c| {
        if a == c {
            2.0 * hs[a]
        } else {
            let (j, k) = (a as i64 - hw, c as i64 - hw);
            2.0 * sign(j + k) * (gs[a] - gs[c]) / (PI * (j - k) as f64)
        }
    })
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    let eig = m.try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::Numeric(format!("symmetric eigensolver did not converge for a {dim}×{dim} matrix"))
    })?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Assembles the `M × M` matrix of `Z_{K,I}` from the terms `n <= N`.
pub fn assemble(k: &Semigroup, interval: IntervalSpec, m: usize, n: u64, opts: &FrameOptions) -> Result<FrameMatrix> {
    let hw = half_width(m)?;
    let t = interval.t;
    if n > k.bound() {
        return Err(Error::InsufficientSemigroup { needed: n, available: k.bound() });
    }
    if n < 1 {
        return Err(Error::input("cutoff must be at least 1"));
    }
    let len = k.elements().partition_point(|&e| e <= n);
    let (u, v) = branch_sums(&k.logs()[..len], &k.elements()[..len], t, hw, opts.exec);
    let scale = 2.0 * t / (2.0 * PI);
    let raw = DMatrix::from_fn(m, m, |a, c| {
        if a == c {
            scale * v[a]
        } else {
            let (j, kk) = (a as i64 - hw, c as i64 - hw);
            scale * sign(j + kk) * (u[a] - u[c]) / (PI * (j - kk) as f64)
        }
    });

    let max_abs = raw.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut defect = 0.0f64;
    for a in 0..m {
        for c in 0..a {
            defect = defect.max((raw[(a, c)] - raw[(c, a)]).abs());
        }
    }
    let symmetry_defect = if max_abs > 0.0 { defect / max_abs } else { 0.0 };
    if symmetry_defect > 1e-12 {
        return Err(Error::Numeric(format!("assembled matrix not symmetric (defect {symmetry_defect:e})")));
    }

    let model = match opts.tail {
        FrameTail::Auto => density_model(k),
        FrameTail::Truncate => None,
        FrameTail::Density(d) => Some(d),
    };
    let nf = n as f64;
    let ln_n = nf.ln();
    let deriv = 2.0 * t + 4.0 * t * t / 3f64.sqrt();
    let (matrix, tail_bound) = match &model {
        Some(d) => {
            let x = t * ln_n;
            let inner = gram(&[(-x, x)], hw);
            let corr = (DMatrix::identity(m, m) * (2.0 * PI) - inner) * (d.density / (2.0 * PI));
            let entry = (2.0 * t * d.envelope(nf) / nf + deriv * d.weighted_tail(nf, 1.0)) / PI;
            (&raw + corr, m as f64 * entry)
        }
        None => {
            let x = t * ln_n;
            let mass: f64 = (-hw..=hw).map(|j| PI / 2.0 - h(x - PI * j as f64)).sum();
            (raw.clone(), 2.0 / PI * mass + deriv / (PI * nf))
        }
    };

    let ev = symmetric_eigenvalues(raw.clone())?;
    Ok(FrameMatrix {
        interval,
        dim: m,
        cutoff: n,
        raw,
        matrix,
        tail_model: model,
        tail_bound,
        symmetry_defect,
        raw_min_eigenvalue: ev[0],
        raw_max_eigenvalue: ev[m - 1],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    #[serde(rename = "A_ref")]
    pub a_ref: f64,
    /// `(ε, fraction of eigenvalues within ε of A_ref)`.
    pub cluster_fractions: Vec<(f64, f64)>,
    /// Centre of the most populated histogram bin (width 0.05).
    pub mode: f64,
    pub lower_bound_estimate: f64,
    pub tail_bound: f64,
    pub dim: usize,
    pub cutoff: u64,
}

impl SpectrumReport {
    pub fn cluster_fraction(&self, eps: f64) -> f64 {
        cluster_fraction(&self.eigenvalues, self.a_ref, eps)
    }
}

pub fn cluster_fraction(eigenvalues: &[f64], a: f64, eps: f64) -> f64 {
    if eigenvalues.is_empty() {
        return 0.0;
    }
    eigenvalues.iter().filter(|&&l| (l - a).abs() <= eps).count() as f64 / eigenvalues.len() as f64
}

fn histogram_mode(ev: &[f64]) -> f64 {
    let lo = (ev[0] / HISTOGRAM_BIN).floor();
    let mut counts: Vec<usize> = Vec::new();
    for &l in ev {
        let b = ((l / HISTOGRAM_BIN).floor() - lo) as usize;
        if counts.len() <= b {
            counts.resize(b + 1, 0);
        }
        counts[b] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc })
        .0;
    (lo + best as f64 + 0.5) * HISTOGRAM_BIN
}

/// Full spectrum of the (tail-corrected) matrix and clustering around `a_ref`.
pub fn spectrum(f: &FrameMatrix, a_ref: f64) -> Result<SpectrumReport> {
    let ev = symmetric_eigenvalues(f.matrix.clone())?;
    Ok(SpectrumReport {
        cluster_fractions: CLUSTER_EPS.iter().map(|&e| (e, cluster_fraction(&ev, a_ref, e))).collect(),
        mode: histogram_mode(&ev),
        lower_bound_estimate: ev[0] - f.tail_bound,
        tail_bound: f.tail_bound,
        a_ref,
        dim: f.dim,
        cutoff: f.cutoff,
        eigenvalues: ev,
    })
}

/// `Z g` in coefficient space.
pub fn apply(f: &FrameMatrix, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() != f.dim {
        return Err(Error::input(format!("expected {} coefficients, got {}", f.dim, coeffs.len())));
    }
    let z = f.matrix.map(|x| Complex64::new(x, 0.0)) * DVector::from_column_slice(coeffs);
    Ok(z.iter().copied().collect())
}

/// Band restriction `χ_I 𝓕^{−1} χ_L 𝓕` on the same basis, with `L` cut at
/// `|ξ| < log(N+1)`.
pub fn band_restriction(k: &Semigroup, interval: IntervalSpec, m: usize, n: u64) -> Result<DMatrix<f64>> {
    let hw = half_width(m)?;
    if n > k.bound() {
        return Err(Error::InsufficientSemigroup { needed: n, available: k.bound() });
    }
    let t = interval.t;
    let mut runs: Vec<(u64, u64)> = Vec::new();
    for &e in k.elements().iter().take_while(|&&e| e <= n) {
        match runs.last_mut() {
            Some(r) if r.1 == e => r.1 = e + 1,
            _ => runs.push((e, e + 1)),
        }
    }
    let mut intervals = Vec::with_capacity(2 * runs.len());
    for &(a, b) in &runs {
        let (lo, hi) = (t * (a as f64).ln(), t * (b as f64).ln());
        intervals.push((lo, hi));
        intervals.push((-hi, -lo));
    }
    Ok(gram(&intervals, hw) / (2.0 * PI))
}

#[derive(Clone, Debug, Serialize)]
pub struct BandComparison {
    /// Singular values of `Z − band restriction`, descending.
    pub singular_values: Vec<f64>,
}

/// Exploratory comparison of the truncated operator with the band restriction.
pub fn band_compare(k: &Semigroup, f: &FrameMatrix) -> Result<BandComparison> {
    let b = band_restriction(k, f.interval, f.dim, f.cutoff)?;
    let mut sv: Vec<f64> = symmetric_eigenvalues(&f.raw - b)?.iter().map(|l| l.abs()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(BandComparison { singular_values: sv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selector::PrimeSelector;
    use crate::semigroup::generate;

    fn k(s: &str, x: u64) -> Semigroup {
        generate(&PrimeSelector::parse(s).unwrap(), x).unwrap()
    }

    /// Direct evaluation of the defining sum with explicit sinc values.
    fn direct(k: &Semigroup, t: f64, m: usize, n: u64) -> DMatrix<f64> {
        let hw = (m as i64 - 1) / 2;
        let c = |j: i64, xi: f64| {
            let d = t * xi - PI * j as f64;
            (2.0 * t).sqrt() * if d == 0.0 { 1.0 } else { d.sin() / d }
        };
        DMatrix::from_fn(m, m, |a, b| {
            let (j, kk) = (a as i64 - hw, b as i64 - hw);
            k.elements()
                .iter()
                .take_while(|&&e| e <= n)
                .map(|&e| {
                    let xi = (e as f64).ln();
                    (c(j, xi) * c(kk, xi) + c(j, -xi) * c(kk, -xi)) / e as f64
                })
                .sum::<f64>()
                / (2.0 * PI)
        })
    }

    #[test]
    fn hand_computable_case() {
        let one = k("include:", 10);
        let f = assemble(&one, IntervalSpec::new(PI).unwrap(), 3, 1, &FrameOptions::default()).unwrap();
        assert!((f.matrix[(1, 1)] - 2.0).abs() < 1e-14);
        assert_eq!(f.matrix.iter().filter(|x| x.abs() > 1e-15).count(), 1);
        let s = spectrum(&f, 0.0).unwrap();
        assert!((s.eigenvalues[0]).abs() < 1e-12 && (s.eigenvalues[2] - 2.0).abs() < 1e-12);
        let e0 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = apply(&f, &e0).unwrap();
        assert!((out[1].re - 2.0).abs() < 1e-14 && out[0].norm() < 1e-15);
        assert!(apply(&f, &e0[..2]).is_err());
    }

    #[test]
    fn partial_fractions_match_direct_sum() {
        for sel in ["all", "exclude:2", "include:2,3"] {
            let kk = k(sel, 5000);
            let f = assemble(&kk, IntervalSpec::new(1.3).unwrap(), 9, 5000, &FrameOptions {
                tail: FrameTail::Truncate,
                ..Default::default()
            })
            .unwrap();
            let d = direct(&kk, 1.3, 9, 5000);
            assert!((&f.raw - d).amax() < 1e-12, "{sel}");
        }
    }

    #[test]
    fn gram_full_line_is_orthonormal() {
        let g = gram(&[(-1e7, 1e7)], 3) / (2.0 * PI);
        assert!((g - DMatrix::identity(7, 7)).amax() < 1e-6);
    }

    #[test]
    fn gram_matches_quadrature() {
        let t = 0.8;
        let (lo, hi) = (-2.0, 3.5);
        let g = gram(&[(t * lo, t * hi)], 2);
        let c = |j: i64, xi: f64| {
            let d = t * xi - PI * j as f64;
            (2.0 * t).sqrt() * if d == 0.0 { 1.0 } else { d.sin() / d }
        };
        let steps = 200_000;
        let hstep = (hi - lo) / steps as f64;
        for j in -2..=2i64 {
            for kk in -2..=2i64 {
                let q: f64 = (0..steps)
                    .map(|i| {
                        let xi = lo + (i as f64 + 0.5) * hstep;
                        c(j, xi) * c(kk, xi) * hstep
                    })
                    .sum();
                assert!((g[((j + 2) as usize, (kk + 2) as usize)] - q).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn input_errors() {
        let n = k("all", 100);
        let i = IntervalSpec::new(1.0).unwrap();
        assert!(assemble(&n, i, 4, 100, &FrameOptions::default()).is_err());
        assert!(matches!(
            assemble(&n, i, 3, 101, &FrameOptions::default()),
            Err(Error::InsufficientSemigroup { .. })
        ));
        assert!(IntervalSpec::new(0.0).is_err());
    }

    #[test]
    fn linear_in_k() {
        let opts = FrameOptions { tail: FrameTail::Truncate, ..Default::default() };
        let i = IntervalSpec::new(1.0).unwrap();
        let all = assemble(&k("all", 2000), i, 7, 2000, &opts).unwrap();
        let odd = assemble(&k("exclude:2", 2000), i, 7, 2000, &opts).unwrap();
        let n = k("all", 2000);
        let hw = 3i64;
        let c = |j: i64, xi: f64| {
            let d = xi - PI * j as f64;
            2f64.sqrt() * if d == 0.0 { 1.0 } else { d.sin() / d }
        };
        let even_sum = DMatrix::from_fn(7, 7, |a, b| {
            let (j, kk) = (a as i64 - hw, b as i64 - hw);
            n.elements()
                .iter()
                .filter(|&&e| e % 2 == 0)
                .map(|&e| {
                    let xi = (e as f64).ln();
                    (c(j, xi) * c(kk, xi) + c(j, -xi) * c(kk, -xi)) / e as f64
                })
                .sum::<f64>()
                / (2.0 * PI)
        });
        assert!((&all.raw - &odd.raw - even_sum).amax() < 1e-12);
    }
}
