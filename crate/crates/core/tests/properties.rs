use num_complex::Complex64;
use proptest::prelude::*;

use modzeta::config::ExperimentConfig;
use modzeta::discrepancy::DensityModel;
use modzeta::exec::Execution;
use modzeta::frame::{assemble, cluster_fraction, symmetric_eigenvalues, FrameOptions, FrameTail, IntervalSpec};
use modzeta::frequency::FrequencySet;
use modzeta::lp::{lq_norm_ladder, Weight};
use modzeta::primes::PrimeTable;
use modzeta::selector::PrimeSelector;
use modzeta::semigroup::{density, generate, generate_with, panejah_check};
use modzeta::zeta::{zeta_k, TailModel, ZetaOptions};

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn prime_subset() -> impl Strategy<Value = Vec<u64>> {
    proptest::sample::subsequence(SMALL_PRIMES.to_vec(), 0..=4)
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn selector() -> impl Strategy<Value = PrimeSelector> {
    prop_oneof![
        Just("all".to_string()),
        prime_subset().prop_map(|v| format!("include:{}", join(&v))),
        prime_subset().prop_map(|v| format!("exclude:{}", join(&v))),
        (prop::sample::select(vec![3u64, 4, 5, 8, 12]), 0u64..12).prop_map(|(m, a)| format!("mod:{},{m}", a % m)),
    ]
    .prop_map(|s| PrimeSelector::parse(&s).unwrap())
}

fn factors_in(n: u64, q: &dyn Fn(u64) -> bool) -> bool {
    let mut r = n;
    let mut p = 2;
    while p * p <= r {
        while r.is_multiple_of(p) {
            if !q(p) {
                return false;
            }
            r /= p;
        }
        p += 1;
    }
    r == 1 || q(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generation_matches_trial_division(s in selector(), x in 2u64..3000) {
        let k = generate(&s, x).unwrap();
        let table = PrimeTable::new(x).unwrap();
        let brute: Vec<u64> = (1..=x).filter(|&n| factors_in(n, &|p| s.contains(p, &table).unwrap())).collect();
        prop_assert_eq!(k.elements(), &brute[..]);
        prop_assert_eq!(k.count(x as f64).unwrap(), k.len());
    }

    #[test]
    fn generation_is_execution_independent(s in selector(), x in 2u64..50_000) {
        let a = generate_with(&s, x, Execution::Parallel).unwrap();
        let b = generate_with(&s, x, Execution::Sequential).unwrap();
        prop_assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn closed_under_products(s in selector(), i in 0usize..500, j in 0usize..500) {
        let k = generate(&s, 100_000).unwrap();
        let (a, b) = (k.elements()[i % k.len()], k.elements()[j % k.len()]);
        if a * b <= k.bound() {
            prop_assert!(k.contains(a * b));
        }
    }

    #[test]
    fn finite_exclusion_density(v in prime_subset()) {
        let r = density(&PrimeSelector::parse(&format!("exclude:{}", join(&v))).unwrap(), 1e-12).unwrap();
        let exact: f64 = v.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
        prop_assert!((r.density - exact).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn counting_error_within_envelope(s in selector(), u in 1.0f64..20_000.0) {
        if let Some(model) = DensityModel::for_selector(&s) {
            let k = generate(&s, 20_000).unwrap();
            let err = (k.count(u).unwrap() as f64 - model.density * u).abs();
            prop_assert!(err <= model.envelope(u) + 1e-9, "{} at {}: {} > {}", s, u, err, model.envelope(u));
        }
    }

    #[test]
    fn panejah_ratios_bounded(s in selector(), delta in 0.05f64..0.95, x in 10.0f64..20_000.0) {
        let k = generate(&s, 20_000).unwrap();
        let r = panejah_check(&k, delta, &[x]).unwrap().ratios[0].1;
        prop_assert!(r >= 0.0 && r <= 1.0 - delta + 1.0 / x + 1e-12);
        if matches!(s, PrimeSelector::All) {
            prop_assert_eq!(r, (x.floor() - (delta * x).floor()) / x);
        }
    }

    #[test]
    fn window_measure_symmetric_and_bounded(s in selector(), xi in -8.0f64..8.0, delta in 0.01f64..3.0) {
        let k = generate(&s, 100_000).unwrap();
        let f = FrequencySet::new(&k);
        let m = f.measure_window(xi, delta).unwrap();
        prop_assert!(m >= 0.0 && m <= delta + 1e-12);
        let mirror = f.measure_window(delta - xi, delta).unwrap();
        prop_assert!((m - mirror).abs() < 1e-12);
    }

    #[test]
    fn sandwich_holds(s in selector(), xi in 0.5f64..11.0, delta in 0.1f64..2.0) {
        let k = generate(&s, 100_000).unwrap();
        prop_assume!(xi >= delta);
        let rows = FrequencySet::new(&k).panejah_measure_inf(delta, &[xi]).unwrap().rows;
        prop_assert!(rows[0].holds);
    }

    #[test]
    fn zeta_conjugate_symmetry_and_monotonicity(s in selector(), sigma in 1.2f64..3.0, t in -20.0f64..20.0) {
        let k = generate(&s, 200_000).unwrap();
        let opts = ZetaOptions { tol: 1e-4, tail: TailModel::Auto, exec: Execution::Sequential };
        let Ok(z) = zeta_k(&k, Complex64::new(sigma, t), &opts) else { return Ok(()) };
        let zc = zeta_k(&k, Complex64::new(sigma, -t), &opts).unwrap();
        prop_assert!((z.value - zc.value.conj()).norm() < 1e-12);
        let lo = zeta_k(&k, Complex64::new(sigma, 0.0), &opts).unwrap();
        let hi = zeta_k(&k, Complex64::new(sigma + 0.1, 0.0), &opts).unwrap();
        prop_assert!(hi.value.re <= lo.value.re + lo.truncation_bound + hi.truncation_bound);
    }

    #[test]
    fn frame_matrices_symmetric_psd_and_monotone(
        inner in prime_subset(),
        extra in prime_subset(),
        t in 0.3f64..4.0,
        m in prop::sample::select(vec![3usize, 5, 9, 13]),
    ) {
        let n = 5_000;
        let mut outer = inner.clone();
        outer.extend(extra);
        let opts = FrameOptions { tail: FrameTail::Truncate, exec: Execution::Sequential };
        let interval = IntervalSpec::new(t).unwrap();
        let a = assemble(&generate(&PrimeSelector::parse(&format!("include:{}", join(&inner))).unwrap(), n).unwrap(), interval, m, n, &opts).unwrap();
        let b = assemble(&generate(&PrimeSelector::parse(&format!("include:{}", join(&outer))).unwrap(), n).unwrap(), interval, m, n, &opts).unwrap();
        let scale = b.raw_max_eigenvalue.abs().max(1e-300);
        prop_assert!(a.symmetry_defect <= 1e-12 && b.symmetry_defect <= 1e-12);
        prop_assert!(a.raw_min_eigenvalue >= -1e-8 * scale);
        let diff = symmetric_eigenvalues(&b.raw - &a.raw).unwrap();
        prop_assert!(diff[0] >= -1e-8 * scale);
    }

    #[test]
    fn cluster_fraction_monotone(ev in prop::collection::vec(-1.0f64..2.0, 1..40), a in 0.0f64..1.0, e1 in 0.0f64..0.5, e2 in 0.0f64..0.5) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (f1, f2) = (cluster_fraction(&ev, a, lo), cluster_fraction(&ev, a, hi));
        prop_assert!((0.0..=1.0).contains(&f1) && f1 <= f2);
    }

    #[test]
    fn subadditive_weights(a in 1u64..5000, b in 1u64..5000) {
        let table = PrimeTable::new(5000).unwrap();
        for w in [Weight::Omega, Weight::LogOnePlusLog, Weight::LogPow(0.5), Weight::LogPow(1.0)] {
            prop_assert!(w.at(a * b, &table) <= w.at(a, &table) + w.at(b, &table) + 1e-12);
        }
    }

    #[test]
    fn selector_display_round_trips(s in selector()) {
        prop_assert_eq!(PrimeSelector::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn config_round_trips(
        s in selector(),
        x in 2u64..10_000_000,
        t in 0.01f64..100.0,
        half in 0usize..100,
        deltas in prop::collection::vec(1e-6f64..0.999, 1..6),
        qs in prop::collection::vec(1.0f64..8.0, 1..4),
        seed in any::<u64>(),
    ) {
        let c = ExperimentConfig {
            selector: s.to_string(),
            x,
            t,
            m: 2 * half + 1,
            n: x / 2 + 1,
            deltas,
            qs,
            out: "runs/out dir".into(),
            seed,
        };
        c.validate().unwrap();
        prop_assert_eq!(ExperimentConfig::parse(&c.to_string()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn norms_grow_with_interval_and_obey_holder(t1 in 0.2f64..1.5, extra in 0.0f64..1.5) {
        let k = generate(&PrimeSelector::All, 100_000).unwrap();
        let opts = ZetaOptions::with_tol(1e-4);
        let t2 = t1 + extra;
        let n1 = lq_norm_ladder(&k, 1.0, 1.0, t1, &[0.1], &opts).unwrap().rows[0];
        let n2 = lq_norm_ladder(&k, 1.0, 1.0, t2, &[0.1], &opts).unwrap().rows[0];
        prop_assert!(n1.norm <= n2.norm + n1.error_estimate + n2.error_estimate);
        let q2 = lq_norm_ladder(&k, 1.0, 2.0, t2, &[0.1], &opts).unwrap().rows[0];
        prop_assert!(n2.norm <= (2.0 * t2).sqrt() * q2.norm + n2.error_estimate + q2.error_estimate);
    }
}
