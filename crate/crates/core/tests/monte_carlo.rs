//! Seeded Monte Carlo frequencies for the test decision rules and the
//! simulation engine itself.

use vecmkit_core::cointegration::{johansen_test, DetCase, JohansenSpec};
use vecmkit_core::mcsim::{
    generate, rejection_rate, simulate_quantiles, Dgp, McConfig, McReport, McTest, NullStatistic,
};
use vecmkit_core::series::Deterministics;
use vecmkit_core::unitroot::{adf_test, AdfSpec};
use vecmkit_core::vecm::build_ect;

fn adf_constant() -> McTest {
    McTest::Adf {
        spec: AdfSpec::fixed(Deterministics::Constant, 0),
    }
}

fn config(seed: u64, replications: usize, sample_length: usize) -> McConfig {
    McConfig {
        seed,
        replications,
        sample_length,
    }
}

#[test]
fn adf_pvalues_under_the_null_are_uniform() {
    // Under the null P(p > 0.10) is 0.90; 3σ binomial band for 1,000 draws.
    let spec = AdfSpec::fixed(Deterministics::Constant, 0);
    let above = (0..1000u64)
        .filter(|&seed| {
            let y = generate(&Dgp::random_walk(1), 500, seed).unwrap();
            adf_test(&y.series()[0], &spec).unwrap().p_value > 0.10
        })
        .count();
    assert!((872..=928).contains(&above), "{above} of 1000");
}

#[test]
fn adf_rejects_white_noise() {
    let spec = AdfSpec::fixed(Deterministics::Constant, 0);
    let rejected = (0..1000u64)
        .filter(|&seed| {
            let y = generate(&Dgp::ar1(0.0), 500, 10_000 + seed).unwrap();
            adf_test(&y.series()[0], &spec).unwrap().reject_unit_root
        })
        .count();
    assert!(rejected >= 990, "{rejected} of 1000");
}

#[test]
fn adf_size_and_power() {
    let size = rejection_rate(&adf_constant(), &Dgp::random_walk(1), &config(1, 10_000, 100), 0.05).unwrap();
    let rate = size.rejection_rate.unwrap();
    assert!((0.04..=0.06).contains(&rate), "size {rate}");
    assert_eq!(size.failures, 0);
    let power = rejection_rate(&adf_constant(), &Dgp::ar1(0.5), &config(2, 1000, 200), 0.05).unwrap();
    assert!(power.rejection_rate.unwrap() > 0.9);
}

fn johansen_trace() -> McTest {
    McTest::JohansenTrace {
        spec: JohansenSpec::default(),
    }
}

// The unrestricted-constant null distributions presume drifting series;
// without drift the restricted-constant case is the matching specification.
#[test]
fn driftless_walks_need_the_restricted_constant_case() {
    let test = McTest::JohansenTrace {
        spec: JohansenSpec {
            det_case: DetCase::RestrictedConstant,
            ..JohansenSpec::default()
        },
    };
    let r = rejection_rate(&test, &Dgp::random_walk(2), &config(4, 1000, 200), 0.05).unwrap();
    assert!(r.rank_counts.unwrap()[0] >= 900);
    let r = rejection_rate(&test, &Dgp::cointegrated(2, 1, 0.5), &config(3, 1000, 200), 0.05).unwrap();
    assert!(r.rank_counts.unwrap()[1] >= 900);
}

#[test]
fn johansen_selects_rank_one_for_cointegrated_pair() {
    let r = rejection_rate(&johansen_trace(), &Dgp::cointegrated(2, 1, 0.5).with_drift(0.5), &config(3, 1000, 200), 0.05).unwrap();
    let counts = r.rank_counts.unwrap();
    assert!(counts[1] >= 900, "{counts:?}");
}

#[test]
fn johansen_selects_rank_zero_for_independent_walks() {
    let r = rejection_rate(&johansen_trace(), &Dgp::random_walk(2).with_drift(0.5), &config(4, 1000, 200), 0.05).unwrap();
    let counts = r.rank_counts.unwrap();
    assert!(counts[0] >= 900, "{counts:?}");
}

#[test]
fn error_correction_term_is_stationary() {
    let dgp = Dgp::cointegrated(2, 1, 0.5);
    let beta = dgp.cointegrating_vectors().unwrap();
    let spec = AdfSpec::fixed(Deterministics::Constant, 0);
    let rejected = (0..500u64)
        .filter(|&seed| {
            let d = generate(&dgp, 200, 50_000 + seed).unwrap();
            let ect = build_ect(&d, &beta, DetCase::UnrestrictedConstant).unwrap();
            adf_test(&ect[0], &spec).unwrap().reject_unit_root
        })
        .count();
    assert!(rejected >= 450, "{rejected} of 500");
}

#[test]
fn generated_cointegrating_combination_rejects_unit_root() {
    let dgp = Dgp::cointegrated(2, 1, 0.5);
    let d = generate(&dgp, 500, 77).unwrap();
    let ect = build_ect(&d, &dgp.cointegrating_vectors().unwrap(), DetCase::UnrestrictedConstant).unwrap();
    assert!(adf_test(&ect[0], &AdfSpec::fixed(Deterministics::Constant, 0)).unwrap().reject_unit_root);
    let r = johansen_test(&d, &JohansenSpec::default()).unwrap();
    assert_eq!(r.rank_trace, 1);
}

#[test]
fn simulated_trace_quantile_matches_table() {
    let r = simulate_quantiles(
        NullStatistic::Trace(DetCase::UnrestrictedConstant),
        1,
        1000,
        &config(5, 100_000, 1000),
    )
    .unwrap();
    let q95 = r.critical_value(0.95).unwrap();
    assert!((q95 - 3.841465).abs() <= 0.15, "{q95}");
    assert!(r.quantile(0.99).unwrap() > q95);
    assert_eq!(r.failures, 0);
}

#[test]
fn simulated_adf_quantile_matches_asymptote() {
    let r = simulate_quantiles(NullStatistic::AdfT(Deterministics::Constant), 1, 1000, &config(6, 100_000, 1000)).unwrap();
    let cv = r.critical_value(0.95).unwrap();
    assert!((cv - -2.86).abs() <= 0.05, "{cv}");
    assert!(r.quantile(0.01).unwrap() < r.quantile(0.05).unwrap());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| -> McReport {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| rejection_rate(&johansen_trace(), &Dgp::cointegrated(3, 1, 0.5), &config(9, 200, 60), 0.05).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert!(one.same_results(&four));
    assert_eq!(one.draws.len(), 200);
}

#[test]
fn quantile_error_shrinks_with_replications() {
    let spread = |reps: usize| -> f64 {
        let qs: Vec<f64> = (0..12u64)
            .map(|s| {
                simulate_quantiles(NullStatistic::AdfT(Deterministics::Constant), 1, 100, &config(1_000 * s, reps, 100))
                    .unwrap()
                    .critical_value(0.95)
                    .unwrap()
            })
            .collect();
        let mean = qs.iter().sum::<f64>() / qs.len() as f64;
        (qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (qs.len() - 1) as f64).sqrt()
    };
    let small = spread(1_000);
    let large = spread(4_000);
    assert!(large < 0.8 * small, "sd {small} at 1k reps, {large} at 4k");
}
