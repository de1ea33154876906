//! The acceptance battery: twelve numbered checks, each reporting its
//! measurements and a pass/fail verdict. Reports are deterministic for a
//! given scale and seed; wall-clock times are returned separately.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{construct_dyadic, construct_windows, DyadicConstruction, WindowConstruction};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::frame::{assemble, spectrum, symmetric_eigenvalues, FrameOptions, FrameTail, IntervalSpec};
use crate::frequency::FrequencySet;
use crate::lp::{lq_norm_ladder, malliavin_diagnostic, Weight, MALLIAVIN_CONSTANT};
use crate::primes::PrimeTable;
use crate::selector::PrimeSelector;
use crate::semigroup::{density_with, generate_with, panejah_check, DEFAULT_MAX_EULER_PRIME};
use crate::zeta::{delta_ladder, zeta_j_euler, zeta_k, TailModel, ZetaOptions};

/// Selectors shipped with the tool and exercised by the battery.
pub const SHIPPED_SELECTORS: [&str; 8] = [
    "all",
    "exclude:2",
    "exclude:2,3",
    "include:2,3,5",
    "mod:1,4",
    "mod:3,4",
    "construct:6a:delta=0.1",
    "construct:6b",
];

/// Criterion-12 runtime budget for two quick batteries.
pub const QUICK_BUDGET: Duration = Duration::from_secs(600);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Full,
    Quick,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub measurements: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub scale: Scale,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "semigroup matches trial division"),
    (2, "density of exclude:2,3"),
    (3, "zeta cross-checks"),
    (4, "panejah ratios"),
    (5, "measure sandwich"),
    (6, "frame matrix invariants"),
    (7, "operator structure"),
    (8, "hand-computable operator"),
    (9, "mertens band"),
    (10, "prime-set constructions"),
    (11, "norm ladder and weighted-sum inequality"),
    (12, "determinism"),
];

fn sel(s: &str) -> PrimeSelector {
    PrimeSelector::parse(s).expect("built-in selector parses")
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `ζ(s)` for real `s > 1` by Euler–Maclaurin with four Bernoulli terms.
pub fn riemann_zeta_real(s: f64) -> f64 {
    const N: f64 = 1000.0;
    let head: f64 = (1..1000).map(|n| (n as f64).powf(-s)).sum();
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    let (mut rising, mut fact) = (s, 2.0);
    let mut power = N.powf(-s - 1.0);
    for (i, bk) in b.iter().enumerate() {
        tail += bk / fact * rising * power;
        let k = 2.0 * i as f64 + 2.0;
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        power /= N * N;
    }
    head + tail
}

fn trial_member(n: u64, q: &dyn Fn(u64) -> bool) -> bool {
    let mut r = n;
    let mut p = 2;
    while p * p <= r {
        if r.is_multiple_of(p) {
            if !q(p) {
                return false;
            }
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        p += 1;
    }
    r == 1 || q(r)
}

fn random_selector(rng: &mut ChaCha8Rng) -> PrimeSelector {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let pick = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(0..=4);
        (0..n).map(|_| SMALL[rng.random_range(0..SMALL.len())]).collect::<Vec<_>>()
    };
    let spec = match rng.random_range(0..4) {
        0 => format!("include:{}", pick(rng).iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        1 => format!("exclude:{}", pick(rng).iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        2 => {
            let m = [3u64, 4, 5, 8][rng.random_range(0..4)];
            format!("mod:{},{m}", rng.random_range(0..m))
        }
        _ => "all".to_string(),
    };
    sel(&spec)
}

fn semigroup_oracle(scale: Scale, seed: u64, exec: Execution) -> Result<(bool, Value)> {
    const X: u64 = 10_000;
    let count = if scale == Scale::Full { 50 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = PrimeTable::new(X)?;
    let mut mismatches = Vec::new();
    for _ in 0..count {
        let s = random_selector(&mut rng);
        let k = generate_with(&s, X, exec)?;
        let q = |p: u64| s.contains(p, &table).unwrap_or(false);
        let brute: Vec<u64> = (1..=X).filter(|&n| trial_member(n, &q)).collect();
        if brute != k.elements() {
            mismatches.push(s.to_string());
        }
    }
    Ok((mismatches.is_empty(), json!({ "selectors": count, "X": X, "mismatches": mismatches })))
}

fn density_check(exec: Execution) -> Result<(bool, Value)> {
    let s = sel("exclude:2,3");
    let report = density_with(&s, 1e-12, DEFAULT_MAX_EULER_PRIME, exec)?;
    let k = generate_with(&s, 1_000_000, exec)?;
    let empirical = k.count(1e6)? as f64 / 1e6;
    let exact = (report.density - 1.0 / 3.0).abs() <= 1e-15;
    let close = (empirical - 1.0 / 3.0).abs() <= 1e-2;
    Ok((exact && close, json!({ "A": report.density, "pi_K_ratio": empirical })))
}

fn zeta_check(exec: Execution) -> Result<(bool, Value)> {
    let opts = ZetaOptions { tol: 1e-9, tail: TailModel::Auto, exec };
    let n = generate_with(&sel("all"), 200_000, exec)?;
    let z2 = zeta_k(&n, real(2.0), &opts)?;
    let err2 = (z2.value.re - std::f64::consts::PI.powi(2) / 6.0).abs();

    let s = sel("exclude:2,3");
    let k = generate_with(&s, 200_000, exec)?;
    let zk = zeta_k(&k, real(1.5), &ZetaOptions { tol: 1e-6, tail: TailModel::Auto, exec })?;
    let zj = zeta_j_euler(&s, real(1.5), 1e-12, exec)?;
    let reference = riemann_zeta_real(1.5);
    let err15 = (zk.value.re * zj.value.re - reference).abs();
    Ok((
        err2 <= 1e-6 && err15 <= 1e-4,
        json!({
            "zeta_N_2": z2.value.re,
            "zeta_N_2_error": err2,
            "zeta_K_1_5": zk.value.re,
            "zeta_J_1_5": zj.value.re,
            "product_error": err15,
        }),
    ))
}

fn panejah_ratios(exec: Execution) -> Result<(bool, Value)> {
    let xs = [1e3, 1e4, 1e5, 1e6];
    let n = panejah_check(&generate_with(&sel("all"), 1_000_000, exec)?, 0.5, &[1e6])?;
    let pow2 = panejah_check(&generate_with(&sel("include:2"), 1_000_000, exec)?, 0.5, &[1e6])?;
    let smooth = panejah_check(&generate_with(&sel("include:2,3"), 1_000_000, exec)?, 0.5, &xs)?;
    let r_n = n.ratios[0].1;
    let r_pow2 = pow2.ratios[0].1;
    let smooth_ratios: Vec<f64> = smooth.ratios.iter().map(|r| r.1).collect();
    let decreasing = smooth_ratios.windows(2).all(|w| w[1] < w[0]);
    Ok((
        (r_n - 0.5).abs() <= 1e-5 && r_pow2 <= 1e-4 && decreasing,
        json!({ "naturals": r_n, "powers_of_two": r_pow2, "three_smooth": smooth_ratios }),
    ))
}

fn sandwich(seed: u64, exec: Execution) -> Result<(bool, Value)> {
    let k = generate_with(&sel("exclude:2"), 1_000_000, exec)?;
    let f = FrequencySet::new(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let hi = f.xi_max();
    let grid: Vec<f64> = (0..100).map(|_| rng.random_range(1.0..hi)).collect();
    let m = f.panejah_measure_inf(1.0, &grid)?;
    let failures = m.rows.iter().filter(|r| !r.holds).count();
    Ok((failures == 0, json!({ "windows": grid.len(), "failures": failures, "inf_measure": m.inf })))
}

const NESTED: [(&str, &str); 10] = [
    ("include:", "include:2"),
    ("include:2", "include:2,3"),
    ("include:2,3", "include:2,3,5"),
    ("include:2,3,5", "all"),
    ("include:3", "exclude:2"),
    ("mod:1,4", "exclude:2"),
    ("exclude:2,3", "exclude:2"),
    ("exclude:2", "all"),
    ("include:5,7", "exclude:2,3"),
    ("mod:1,3", "exclude:3"),
];

fn frame_invariants(scale: Scale, exec: Execution) -> Result<(bool, Value)> {
    let (m, n) = if scale == Scale::Full { (17, 100_000) } else { (9, 10_000) };
    let interval = IntervalSpec::new(1.0)?;
    let opts = FrameOptions { tail: FrameTail::Truncate, exec };
    let mut worst_symmetry = 0.0f64;
    let mut worst_psd = f64::INFINITY;
    let mut worst_order = f64::INFINITY;
    for (small, large) in NESTED {
        let a = assemble(&generate_with(&sel(small), n, exec)?, interval, m, n, &opts)?;
        let b = assemble(&generate_with(&sel(large), n, exec)?, interval, m, n, &opts)?;
        for f in [&a, &b] {
            worst_symmetry = worst_symmetry.max(f.symmetry_defect);
            let scale = f.raw_max_eigenvalue.abs().max(f64::MIN_POSITIVE);
            worst_psd = worst_psd.min(f.raw_min_eigenvalue / scale);
        }
        let diff = symmetric_eigenvalues(&b.raw - &a.raw)?;
        worst_order = worst_order.min(diff[0] / b.raw_max_eigenvalue.abs().max(f64::MIN_POSITIVE));
    }
    Ok((
        worst_symmetry <= 1e-12 && worst_psd >= -1e-8 && worst_order >= -1e-8,
        json!({
            "M": m,
            "N": n,
            "pairs": NESTED.len(),
            "max_symmetry_defect": worst_symmetry,
            "min_relative_eigenvalue": worst_psd,
            "min_relative_difference_eigenvalue": worst_order,
        }),
    ))
}

fn operator_structure(scale: Scale, exec: Execution) -> Result<(bool, Value)> {
    let n = if scale == Scale::Full { 1_000_000 } else { 200_000 };
    let dims = [17, 33, 65];
    let interval = IntervalSpec::new(1.0)?;
    let opts = FrameOptions { tail: FrameTail::Auto, exec };
    let run = |s: &str, a: f64| -> Result<Vec<crate::frame::SpectrumReport>> {
        let k = generate_with(&sel(s), n, exec)?;
        dims.iter().map(|&m| spectrum(&assemble(&k, interval, m, n, &opts)?, a)).collect()
    };
    let naturals = run("all", 1.0)?;
    let odds = run("exclude:2", 0.5)?;
    let pow2 = run("include:2", 0.0)?;
    let fractions: Vec<f64> = naturals.iter().map(|r| r.cluster_fraction(0.2)).collect();
    let modes: Vec<f64> = odds.iter().map(|r| r.mode).collect();
    let lower: Vec<f64> = pow2.iter().map(|r| r.lower_bound_estimate).collect();
    let pass = fractions.windows(2).all(|w| w[1] >= w[0])
        && fractions[2] >= 0.5
        && (modes[2] - 0.5).abs() <= 0.2
        && lower.windows(2).all(|w| w[1] < w[0])
        && lower[2] <= 0.1;
    Ok((
        pass,
        json!({
            "N": n,
            "M": dims,
            "naturals_cluster_fraction_0_2": fractions,
            "odds_mode": modes,
            "powers_of_two_lower_bound_estimate": lower,
        }),
    ))
}

fn hand_operator(exec: Execution) -> Result<(bool, Value)> {
    let one = generate_with(&sel("include:"), 1, exec)?;
    let f = assemble(&one, IntervalSpec::new(std::f64::consts::PI)?, 3, 1, &FrameOptions { tail: FrameTail::Truncate, exec })?;
    let ev = symmetric_eigenvalues(f.raw.clone())?;
    let err = ev.iter().zip([0.0, 0.0, 2.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-10, json!({ "eigenvalues": ev, "max_error": err })))
}

fn mertens_band(exec: Execution) -> Result<(bool, Value)> {
    let table = PrimeTable::with_execution(1_000_000, exec)?;
    let xs = [1e4, 1e5, 1e6];
    let vals = xs.iter().map(|&x| table.mertens_sum(x)).collect::<Result<Vec<_>>>()?;
    let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let inside = vals.iter().all(|&v| v > -2.0 && v < 0.0);
    Ok((spread <= 0.2 && inside, json!({ "x": xs, "value": vals, "spread": spread })))
}

fn constructions(exec: Execution) -> Result<(bool, Value)> {
    let windows = construct_windows(&WindowConstruction::parse("delta=0.1")?, &PrimeTable::with_execution(1_000_000, exec)?)?;
    let shrinking = windows.increments_shrink_by(2.0);
    let window_sums: Vec<f64> = windows.intervals.iter().map(|i| i.window_log_sum).collect();
    let windows_ok = !window_sums.is_empty() && window_sums.iter().all(|&s| s >= 0.3);

    let table = PrimeTable::with_execution(1 << 21, exec)?;
    let dyadic = construct_dyadic(&DyadicConstruction::default(), &table, &[0.5], &[1e4, 1e5, 1e6])?;
    let tracks = dyadic.tracks_reference(4.0);
    let sums: Vec<f64> = dyadic.windows.iter().map(|w| w.sum).collect();
    let decays = sums.windows(2).all(|w| w[1] < w[0]);
    let bounded = dyadic.windows.iter().all(|w| w.sum <= w.scale);
    let ratios: Vec<f64> = dyadic.blocks.iter().map(|b| b.reciprocal_sum / b.reference).collect();
    Ok((
        shrinking && windows_ok && tracks && decays && bounded,
        json!({
            "windows_decade_increments": windows.decade_increments(),
            "windows_log_sums": window_sums,
            "dyadic_increment_ratios": ratios,
            "dyadic_window_sums": sums,
            "dyadic_window_scale": dyadic.windows.iter().map(|w| w.scale).collect::<Vec<_>>(),
        }),
    ))
}

fn lp_checks(scale: Scale, exec: Execution) -> Result<(bool, Value)> {
    let k = generate_with(&sel("all"), 1_000_000, exec)?;
    let ladder = lq_norm_ladder(&k, 1.0, 1.0, 1.0, &delta_ladder(), &ZetaOptions { tol: 1e-5, tail: TailModel::Auto, exec })?;
    let stable = ladder.last_relative_change <= 0.05;

    let x = if scale == Scale::Full { 100_000 } else { 10_000 };
    let weights = [Weight::Omega, Weight::LogOnePlusLog, Weight::LogPow(0.5), Weight::LogPow(1.0)];
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for s in SHIPPED_SELECTORS {
        for w in weights {
            for sigma in [1.5, 2.0] {
                let r = malliavin_diagnostic(&sel(s), w, sigma, x, MALLIAVIN_CONSTANT, exec)?;
                if r.rhs > 0.0 {
                    worst = worst.max(r.lhs / r.rhs);
                }
                if !r.holds {
                    failures.push(format!("{s} {w} σ={sigma}"));
                }
            }
        }
    }
    Ok((
        stable && failures.is_empty(),
        json!({
            "norms": ladder.rows.iter().map(|r| r.norm).collect::<Vec<_>>(),
            "last_relative_change": ladder.last_relative_change,
            "max_weighted_ratio": worst,
            "weighted_failures": failures,
        }),
    ))
}

fn run_one(id: u8, scale: Scale, seed: u64, exec: Execution) -> Result<(bool, Value)> {
    match id {
        1 => semigroup_oracle(scale, seed, exec),
        2 => density_check(exec),
        3 => zeta_check(exec),
        4 => panejah_ratios(exec),
        5 => sandwich(seed, exec),
        6 => frame_invariants(scale, exec),
        7 => operator_structure(scale, exec),
        8 => hand_operator(exec),
        9 => mertens_band(exec),
        10 => constructions(exec),
        11 => lp_checks(scale, exec),
        12 => determinism(seed, exec),
        _ => Err(Error::input(format!("no criterion {id}"))),
    }
}

fn outcome(id: u8, result: Result<(bool, Value)>) -> CriterionOutcome {
    let name = CRITERIA[id as usize - 1].1;
    match result {
        Ok((passed, measurements)) => CriterionOutcome { id, name, passed, measurements },
        Err(e) => CriterionOutcome { id, name, passed: false, measurements: json!({ "error": e.to_string() }) },
    }
}

/// Runs one criterion; errors are folded into a failed outcome.
pub fn run_criterion(id: u8, scale: Scale, seed: u64, exec: Execution) -> CriterionOutcome {
    outcome(id, run_one(id, scale, seed, exec))
}

fn battery(scale: Scale, seed: u64, exec: Execution) -> Vec<CriterionOutcome> {
    (1..=11).map(|id| run_criterion(id, scale, seed, exec)).collect()
}

fn determinism(seed: u64, exec: Execution) -> Result<(bool, Value)> {
    let start = Instant::now();
    let first = serde_json::to_string(&battery(Scale::Quick, seed, exec)).expect("serialises");
    let second = serde_json::to_string(&battery(Scale::Quick, seed, exec)).expect("serialises");
    let identical = first == second;
    let within = start.elapsed() <= QUICK_BUDGET;
    Ok((identical && within, json!({ "identical": identical, "within_budget": within })))
}

/// Runs all twelve criteria. Returns the report and per-criterion wall time.
pub fn run_suite(scale: Scale, seed: u64, exec: Execution) -> (SuiteReport, Vec<Duration>) {
    let mut criteria = Vec::with_capacity(12);
    let mut times = Vec::with_capacity(12);
    for (id, _) in CRITERIA {
        let start = Instant::now();
        criteria.push(run_criterion(id, scale, seed, exec));
        times.push(start.elapsed());
    }
    let passed = criteria.iter().all(|c| c.passed);
    (SuiteReport { scale, seed, passed, criteria }, times)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_maclaurin_reference() {
        assert!((riemann_zeta_real(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((riemann_zeta_real(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn trial_membership() {
        let q = |p: u64| p == 2 || p == 3;
        let smooth: Vec<u64> = (1..=20).filter(|&n| trial_member(n, &q)).collect();
        assert_eq!(smooth, vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
    }

    #[test]
    fn cheap_criteria_pass() {
        for id in [1, 8, 9] {
            let c = run_criterion(id, Scale::Quick, 1, Execution::default());
            assert!(c.passed, "{}: {}", c.name, c.measurements);
        }
    }
}
