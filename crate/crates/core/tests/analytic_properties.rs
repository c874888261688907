use std::f64::consts::FRAC_PI_4;

use grk_core::calculus::{complement_queries, full_queries};
use grk_core::hierarchy::{corollary_check, theorem_check};
use grk_core::optimizer::{
    alpha_upper_bound, f, f_prime, f_prime_numeric, lemma1_margin, lemma2_slope, AsymptoticRegime,
};
use grk_core::{
    alpha_opt, asymptotic_gap, eta_of_alpha, eta_opt, hierarchy_gap, s_coeff, t_coeff,
    BlockCount, HierarchySpec,
};
use proptest::prelude::*;

#[test]
fn optimum_lies_on_constraint_curve() {
    let mut k = 2.0f64;
    while k <= 100.0 {
        let a = alpha_opt(k).unwrap().min(alpha_upper_bound(BlockCount::Finite(k)).unwrap());
        let e = eta_of_alpha(a, k).unwrap();
        assert!((e - eta_opt(k).unwrap()).abs() < 1e-10, "k = {k}");
        k += 0.5;
    }
}

#[test]
fn grk_beats_full_search() {
    for k in 2..=1024 {
        assert!(s_coeff(k as f64).unwrap().value() < FRAC_PI_4, "k = {k}");
    }
}

#[test]
fn two_level_gap_positive_on_grid() {
    for k1 in 2..=64 {
        for k2 in 2..=64 {
            let d = theorem_check(k1 as f64, k2 as f64).unwrap();
            assert!(d.holds, "({k1},{k2}): {d:?}");
            let direct = t_coeff(k1 as f64, k2 as f64).unwrap().value()
                - s_coeff((k1 * k2) as f64).unwrap().value();
            assert!((d.gap - direct).abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deeper_hierarchies_cost_more(levels in prop::collection::vec(2u64..=16, 2..=6)) {
        let spec = HierarchySpec::new(levels).unwrap();
        let d = corollary_check::<f64>(&spec).unwrap();
        prop_assert!(d.holds, "{spec}: {d:?}");
        prop_assert!((d.gap - hierarchy_gap::<f64>(&spec).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn real_block_counts_also_satisfy_the_gap(k1 in 2.0f64..500.0, k2 in 2.0f64..500.0) {
        prop_assert!(theorem_check(k1, k2).unwrap().holds);
    }

    #[test]
    fn constraint_curve_stays_in_range(k in 2.0f64..200.0, t in 0.0f64..=1.0) {
        let upper = alpha_upper_bound(BlockCount::Finite(k)).unwrap();
        let a = t * upper;
        let e = eta_of_alpha(a, k).unwrap();
        prop_assert!(e >= a - 1e-12);
        prop_assert!(e <= FRAC_PI_4 * k.sqrt() + 1e-12);
    }
}

#[test]
fn closed_form_derivative_matches_differences_on_grid() {
    for k in 3..=50 {
        let k = k as f64;
        let upper = alpha_upper_bound(BlockCount::Finite(k)).unwrap();
        for i in 1..40 {
            let a = upper * i as f64 / 40.0;
            let exact = f_prime(a, k).unwrap();
            assert!((exact - f_prime_numeric(a, k, 1e-6)).abs() < 1e-5, "k={k} a={a}");
        }
    }
}

#[test]
fn optimum_is_global_on_grid() {
    for k in 2..=100 {
        let k = k as f64;
        let upper = alpha_upper_bound(BlockCount::Finite(k)).unwrap();
        let best = f(alpha_opt(k).unwrap().min(upper), k).unwrap();
        assert!(best < 0.0);
        assert!(best <= f(upper, k).unwrap() + 1e-12);
        for i in 0..=200 {
            assert!(best <= f(upper * i as f64 / 200.0, k).unwrap() + 1e-12, "k = {k}");
        }
    }
}

#[test]
fn lemmas_on_log_grid() {
    let xs: Vec<f64> = (0..=500).map(|i| 2.0 * 5000f64.powf(i as f64 / 500.0)).collect();
    for w in xs.windows(2) {
        assert!(lemma1_margin(w[1]).unwrap() > lemma1_margin(w[0]).unwrap());
        let d = |x: f64| alpha_opt(x).unwrap() - eta_opt(x).unwrap();
        assert!(d(w[1]) < d(w[0]));
        assert!(lemma2_slope(w[0]).unwrap() < 0.0);
        assert!(lemma1_margin(w[0]).unwrap() > 0.0);
    }
}

/// The small-ratio form is the large-`K` limit of the whole gap; it is
/// accurate once `K` itself is large, whatever `K̃` is.
#[test]
fn small_ratio_form_tracks_gap_at_large_k() {
    for k1 in [64.0f64, 256.0, 1024.0] {
        let gap = theorem_check(k1, 2.0).unwrap().gap;
        let asym = asymptotic_gap(k1, 2.0, AsymptoticRegime::SmallRatio).unwrap();
        assert!((gap / asym - 1.0).abs() < 0.10, "k1 = {k1}: {gap} vs {asym}");
    }
    let gap = theorem_check(100.0f64, 1e4).unwrap().gap;
    let asym = asymptotic_gap(100.0, 1e4, AsymptoticRegime::SmallRatio).unwrap();
    assert!((gap / asym - 1.0).abs() < 0.01);
}

/// The large-ratio form describes the second (monotonicity) term of the gap
/// once `K̃` is large.
#[test]
fn large_ratio_form_tracks_second_term() {
    for (k1, k2) in [(1e6f64, 10.0f64), (1e6, 20.0), (1e8, 30.0), (100.0, 1e4)] {
        let d = theorem_check(k1, k2).unwrap();
        let asym = asymptotic_gap(k1, k2, AsymptoticRegime::LargeRatio).unwrap();
        assert!((d.lemma2_term / asym - 1.0).abs() < 0.25, "({k1},{k2}): {} vs {asym}", d.lemma2_term);
    }
}

/// Not claimed as a theorem; the comparison is only reported.
#[test]
fn grk_versus_complement_search_report() {
    let n = 1u64 << 20;
    let mut losses = Vec::new();
    for k in 2..=64u64 {
        let grk = s_coeff(k as f64).unwrap().value();
        let comp = complement_queries::<f64>(n, k).unwrap() / full_queries::<f64>(n) * FRAC_PI_4;
        if grk >= comp {
            losses.push(k);
        }
    }
    println!("block counts where complement search needs fewer queries than GRK: {losses:?}");
}
