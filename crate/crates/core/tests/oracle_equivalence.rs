use grk_core::grk::{operator_word, FinalOp};
use grk_core::sim::{full_state_simulate, DatabaseGeometry, Op, SymmetricState};
use proptest::prelude::*;

const OPS: [Op; 5] = [Op::Global, Op::Local, Op::GlobalInverse, Op::LocalInverse, Op::ReflectUniform];

fn geometry() -> impl Strategy<Value = DatabaseGeometry> {
    (prop::sample::select(vec![2u64, 4, 8, 16]), 1u64..=64).prop_filter_map("N <= 1024", |(k, b)| {
        let n = k * b;
        (n <= 1024).then(|| DatabaseGeometry::new(n, k).unwrap())
    })
}

fn case() -> impl Strategy<Value = (DatabaseGeometry, usize, Vec<Op>)> {
    geometry().prop_flat_map(|g| {
        (
            Just(g),
            0..g.n_items() as usize,
            prop::collection::vec(prop::sample::select(OPS.to_vec()), 0..=12),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduced_and_full_agree((g, target, word) in case()) {
        let full = full_state_simulate::<f64>(g, target, &word, 1024).unwrap();
        let projected = full.project_to_symmetric().unwrap();
        let reduced = SymmetricState::<f64>::uniform(g).apply_word(&word).unwrap();
        prop_assert!(projected.max_abs_diff(&reduced) < 1e-10);
        prop_assert!((reduced.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_tracks_double((g, _t, word) in case()) {
        let a = SymmetricState::<f64>::uniform(g).apply_word(&word).unwrap();
        let b = SymmetricState::<f32>::uniform(g).apply_word(&word).unwrap();
        prop_assert!(a.max_abs_diff(&b.cast()) < 1e-5);
    }

    #[test]
    fn grk_word_matches_operator_powers(
        g in geometry().prop_filter("partitioned", |g| g.n_blocks() >= 2),
        j1 in 0u64..20,
        j2 in 0u64..20,
        f in prop::sample::select(FinalOp::ALL.to_vec()),
    ) {
        let word = operator_word(j1 as i64, j2, f);
        let by_word = SymmetricState::<f64>::uniform(g).apply_word(&word).unwrap();
        let run = grk_core::run_grk(g, grk_core::IterationSchedule::integer(j1, j2, f)).unwrap();
        prop_assert!(by_word.max_abs_diff(&run.final_state) < 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&run.leaked_probability));
    }
}
