use num_complex::Complex64;

use modzeta::constructions::{construct_dyadic, construct_windows, pnt_check, DyadicConstruction, WindowConstruction};
use modzeta::error::Error;
use modzeta::exec::Execution;
use modzeta::frame::{apply, assemble, FrameOptions, FrameTail, IntervalSpec};
use modzeta::frequency::FrequencySet;
use modzeta::primes::{is_prime_trial, PrimeTable};
use modzeta::selector::PrimeSelector;
use modzeta::semigroup::{density, generate};
use modzeta::suite::riemann_zeta_real;
use modzeta::zeta::{zeta_j_euler, zeta_k, ZetaOptions};

fn sel(s: &str) -> PrimeSelector {
    PrimeSelector::parse(s).unwrap()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn factorisation_across_representations() {
    for spec in ["exclude:2", "exclude:3,5", "exclude:2,3,7", "all"] {
        let s = sel(spec);
        let k = generate(&s, 1_000_000).unwrap();
        for sigma in [1.5, 2.0, 3.0] {
            let zk = zeta_k(&k, real(sigma), &ZetaOptions::with_tol(1e-7)).unwrap();
            let zj = zeta_j_euler(&s, real(sigma), 1e-12, Execution::default()).unwrap();
            let z = riemann_zeta_real(sigma);
            let err = (zk.value.re - z / zj.value.re).abs();
            assert!(err <= zk.truncation_bound + 1e-10, "{spec} σ={sigma}: {err}");
        }
    }
}

#[test]
fn truncation_bound_covers_refinement() {
    let cases = [
        ("mod:1,4", vec![Complex64::new(2.0, -10.0), Complex64::new(2.5, 1.0), real(3.0)]),
        ("exclude:2,7", vec![Complex64::new(1.5, 3.0), real(1.2), Complex64::new(1.1, 40.0)]),
    ];
    for (spec, points) in cases {
        let k = generate(&sel(spec), 4_000_000).unwrap();
        for s in points {
            let mut prev = zeta_k(&k, s, &ZetaOptions::with_tol(1e-3)).unwrap();
            for tol in [1e-4, 1e-5] {
                let next = zeta_k(&k, s, &ZetaOptions::with_tol(tol)).unwrap();
                assert!((next.value - prev.value).norm() < prev.truncation_bound, "{spec} s={s} tol={tol}");
                prev = next;
            }
        }
    }
}

#[test]
fn zeta_for_naturals_matches_reference() {
    let k = generate(&PrimeSelector::All, 100_000).unwrap();
    let z = zeta_k(&k, real(2.0), &ZetaOptions::with_tol(1e-9)).unwrap();
    assert!((z.value.re - std::f64::consts::PI.powi(2) / 6.0).abs() <= z.truncation_bound);
    assert!(matches!(zeta_k(&k, real(1.0), &ZetaOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn frequency_set_measure_identities() {
    for spec in ["all", "exclude:2", "include:2,3", "mod:3,4"] {
        let k = generate(&sel(spec), 100_000).unwrap();
        let f = FrequencySet::new(&k);
        let direct: f64 = k.elements().iter().map(|&n| (1.0 / n as f64).ln_1p()).sum();
        assert!((f.positive_measure() - direct).abs() < 1e-10);
        let windows: f64 = (1..=11).map(|i| f.measure_window(i as f64, 1.0).unwrap()).sum::<f64>();
        let clipped = f.measure_window(f.xi_max(), f.xi_max()).unwrap();
        assert!((clipped - direct).abs() < 1e-10, "{spec}");
        assert!(windows <= clipped + 1e-10);
    }
    let n = generate(&PrimeSelector::All, 50_000).unwrap();
    let f = FrequencySet::new(&n);
    assert!((f.positive_measure() - 50_001f64.ln()).abs() < 1e-9);
    assert!((f.measure_window(3.0, 2.5).unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn frame_entries_grow_with_cutoff_within_tail_bound() {
    let k = generate(&sel("exclude:2"), 400_000).unwrap();
    let interval = IntervalSpec::new(1.0).unwrap();
    let truncate = FrameOptions { tail: FrameTail::Truncate, exec: Execution::default() };
    let mut prev = assemble(&k, interval, 9, 25_000, &truncate).unwrap();
    for n in [50_000, 100_000, 200_000, 400_000] {
        let next = assemble(&k, interval, 9, n, &truncate).unwrap();
        for i in 0..9 {
            assert!(next.raw[(i, i)] >= prev.raw[(i, i)]);
        }
        let change = (&next.raw - &prev.raw).amax();
        assert!(change <= prev.tail_bound, "N={n}: {change} > {}", prev.tail_bound);
        prev = next;
    }
}

#[test]
fn apply_matches_matrix_product() {
    let k = generate(&sel("include:2,3,5"), 10_000).unwrap();
    let f = assemble(&k, IntervalSpec::new(2.0).unwrap(), 7, 10_000, &FrameOptions::default()).unwrap();
    let c: Vec<Complex64> = (0..7).map(|i| Complex64::new(i as f64 - 3.0, 0.5 * i as f64)).collect();
    let got = apply(&f, &c).unwrap();
    for (i, g) in got.iter().enumerate() {
        let want: Complex64 = (0..7).map(|j| c[j] * f.matrix[(i, j)]).sum();
        assert!((g - want).norm() < 1e-12);
    }
    assert!(apply(&f, &c[..3]).is_err());
}

#[test]
fn window_construction_keeps_density_but_fails_pnt() {
    let c = WindowConstruction::parse("delta=0.1").unwrap();
    let s = PrimeSelector::Windows(c.clone());
    assert!(density(&s, 1e-6).unwrap().density > 0.0);
    let table = PrimeTable::new(1_000_000).unwrap();
    let report = construct_windows(&c, &table).unwrap();
    for i in &report.intervals {
        assert!(table.open_interval(i.lower, i.upper).iter().all(|&p| is_prime_trial(p)));
    }
    let samples: Vec<f64> = report.intervals.iter().map(|i| i.upper).collect();
    let pnt = pnt_check(&s, 0.1, &samples, &table, None).unwrap();
    assert!(!pnt.holds);
}

#[test]
fn dyadic_construction_diverges_but_passes_pnt() {
    let table = PrimeTable::new(1 << 21).unwrap();
    let c = DyadicConstruction::default();
    let report = construct_dyadic(&c, &table, &[0.5], &[1e4, 1e5, 1e6]).unwrap();
    let sums: Vec<f64> = report.partial_sums.iter().map(|r| r.sum).collect();
    assert!(sums.windows(2).all(|w| w[1] > w[0]));
    assert!(report.tracks_reference(4.0));
    for b in &report.blocks {
        assert!(b.chosen.iter().all(|&p| is_prime_trial(p)));
    }
    let s = PrimeSelector::Dyadic(c);
    let pnt = pnt_check(&s, 0.5, &[1e4, 3e4, 1e5, 3e5, 1e6], &table, None).unwrap();
    assert!(pnt.holds, "{:?}", pnt.trend);
}

#[test]
fn mertens_window_differences() {
    let table = PrimeTable::new(1_000_000).unwrap();
    for delta in [0.5, 0.1, 0.01] {
        for x in [1e4, 1e5, 1e6] {
            let window: f64 = table
                .open_interval(delta * x, x)
                .iter()
                .map(|&p| (p as f64).ln() / p as f64)
                .sum();
            assert!((window - (1.0f64 / delta).ln()).abs() <= 2.0, "δ={delta} x={x}");
        }
    }
}
