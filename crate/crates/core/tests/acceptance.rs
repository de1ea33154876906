use std::time::Instant;

use modzeta::exec::Execution;
use modzeta::suite::{run_criterion, Scale, CRITERIA};

const SEED: u64 = 20_240_917;

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let c = run_criterion(id, Scale::Full, SEED, Execution::default());
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id:>2} {name} ({:.1}s) {}", start.elapsed().as_secs_f64(), c.measurements);
        if !c.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

mod anchors {
    use modzeta::exec::Execution;
    use modzeta::frame::{assemble, spectrum, FrameOptions, IntervalSpec};
    use modzeta::selector::PrimeSelector;
    use modzeta::semigroup::generate;

    fn spectra(selector: &str, a: f64) -> Vec<modzeta::frame::SpectrumReport> {
        let k = generate(&PrimeSelector::parse(selector).unwrap(), 1_000_000).unwrap();
        let interval = IntervalSpec::new(1.0).unwrap();
        [17, 33, 65]
            .iter()
            .map(|&m| spectrum(&assemble(&k, interval, m, 1_000_000, &FrameOptions::default()).unwrap(), a).unwrap())
            .collect()
    }

    #[test]
    fn operator_structure_regression() {
        let naturals = spectra("all", 1.0);
        let fractions: Vec<f64> = naturals.iter().map(|r| r.cluster_fraction(0.2)).collect();
        assert_eq!(fractions, vec![16.0 / 17.0, 32.0 / 33.0, 64.0 / 65.0]);
        for (r, want) in naturals.iter().zip([0.99797, 0.99786, 0.99775]) {
            assert!((r.lower_bound_estimate - want).abs() < 1e-4, "{}", r.lower_bound_estimate);
        }

        let odds = spectra("exclude:2", 0.5);
        for r in &odds {
            assert!((r.mode - 0.525).abs() < 1e-12);
            assert!((r.eigenvalues[0] - 0.492).abs() < 1e-3, "{}", r.eigenvalues[0]);
        }

        let pow2 = spectra("include:2", 0.0);
        for (r, want) in pow2.iter().zip([-0.000763, -0.001482, -0.002919]) {
            assert!((r.lower_bound_estimate - want).abs() < 2e-6, "{}", r.lower_bound_estimate);
        }
        let exec = Execution::Sequential;
        let k = generate(&PrimeSelector::parse("include:2").unwrap(), 1_000_000).unwrap();
        let seq = assemble(&k, IntervalSpec::new(1.0).unwrap(), 65, 1_000_000, &FrameOptions { exec, ..Default::default() })
            .unwrap();
        assert!((spectrum(&seq, 0.0).unwrap().lower_bound_estimate - pow2[2].lower_bound_estimate).abs() < 1e-12);
    }
}
