use proptest::prelude::*;
use spf_core::stats::{
    mean, mean_bounding, mean_error_bound, preprocess_ordered, preprocess_variance, preprocess_variance_with_witness,
    var_from_parts, variance, variance_error_bound, OrderedStatKind, OrderedStatSpec, StatisticOracle, VarianceOracle,
};
use spf_core::verify::brute_force_spf;
use spf_core::{preprocess, Database, SensitivityBounds};

fn kinds() -> impl Strategy<Value = OrderedStatKind> {
    prop_oneof![
        Just(OrderedStatKind::Mean),
        (0.0..0.5f64).prop_map(OrderedStatKind::TrimmedMean),
        Just(OrderedStatKind::Median),
        Just(OrderedStatKind::Minimum),
        Just(OrderedStatKind::Maximum),
    ]
}

fn data(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 1..=max_n)
}

fn without(x: &[f64], i: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    y.remove(i);
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ordered_matches_general(x in data(9), kind in kinds(), delta in 0.0..20.0f64, empty in -50.0..50.0f64) {
        let spec = OrderedStatSpec::new(kind, empty).unwrap();
        let fast = preprocess_ordered(&spec, delta, &x).unwrap();
        let slow = preprocess(&StatisticOracle(spec), &SensitivityBounds::uniform(delta).unwrap(), &Database::from_values(&x))
            .unwrap()
            .value;
        prop_assert!((fast - slow).abs() <= 1e-9, "{:?}: {} vs {}", kind, fast, slow);
    }

    #[test]
    fn variance_matches_general(x in data(9), delta in 0.0..500.0f64) {
        let fast = preprocess_variance(delta, &x).unwrap();
        let slow = preprocess(&VarianceOracle, &SensitivityBounds::uniform(delta).unwrap(), &Database::from_values(&x))
            .unwrap()
            .value;
        prop_assert!((fast - slow).abs() <= 1e-9, "{} vs {}", fast, slow);
    }

    // Removing the largest entry never gives a larger g than removing any
    // other, and removing the smallest never a smaller one.
    #[test]
    fn monotone_removal(x in data(8), kind in kinds(), delta in 0.0..20.0f64) {
        let spec = OrderedStatSpec::new(kind, mean(&x)).unwrap();
        let db = Database::from_values(&x);
        let memo = brute_force_spf(&StatisticOracle(spec), &SensitivityBounds::uniform(delta).unwrap(), &db).unwrap();
        for (s, _) in memo.entries().filter(|(s, _)| s.len() >= 2) {
            let members: Vec<usize> = s.members().collect();
            let lo = memo.get(s.without(members[0])).unwrap();
            let hi = memo.get(s.without(*members.last().unwrap())).unwrap();
            for &i in &members {
                let g = memo.get(s.without(i)).unwrap();
                prop_assert!(hi <= g + 1e-9 && g <= lo + 1e-9, "{:x}", s);
            }
        }
    }

    #[test]
    fn variance_ceiling_and_witness(x in data(40), delta in 0.0..100.0f64) {
        let out = preprocess_variance_with_witness(delta, &x).unwrap();
        prop_assert!(out.value <= variance(&x) + 1e-12);
        let w = &out.sorted[out.witness.clone()];
        let expect = variance(w) + (x.len() - w.len()) as f64 * delta;
        prop_assert!((out.value - expect).abs() <= 1e-9 * expect.abs().max(1.0));
    }

    #[test]
    fn variance_removal_facts(mut x in prop::collection::vec(-100.0..100.0f64, 3..30)) {
        x.sort_by(f64::total_cmp);
        let n = x.len();
        let var = variance(&x);
        let ends = variance(&without(&x, 0)).min(variance(&without(&x, n - 1)));
        for i in 0..n {
            let vi = variance(&without(&x, i));
            prop_assert!(ends <= vi + 1e-9);
            prop_assert!(vi <= n as f64 / (n - 1) as f64 * var + 1e-9);
        }
        for a in 0..n {
            for b in (a + 1)..n {
                let rebuilt = var_from_parts(
                    variance(&without(&x, a)),
                    variance(&without(&x, b)),
                    variance(&without(&without(&x, b), a)),
                    x[a],
                    x[b],
                    n,
                )
                .unwrap();
                prop_assert!((rebuilt - var).abs() <= 1e-9 * var.max(1.0));
            }
        }
    }

    #[test]
    fn accuracy_bounds_and_envelope(
        x in prop::collection::vec(prop_oneof![4 => -100.0..100.0f64, 1 => -1e4..1e4f64], 1..60),
        delta in 0.0..50.0f64,
        mu_hat in -100.0..100.0f64,
    ) {
        let spec = OrderedStatSpec::new(OrderedStatKind::Mean, mu_hat).unwrap();
        let g = preprocess_ordered(&spec, delta, &x).unwrap();
        prop_assert!((g - mean(&x)).abs() <= mean_error_bound(mu_hat, delta, &x).unwrap() + 1e-9);
        let env = mean_bounding(mu_hat, delta, &x).unwrap();
        prop_assert!(env.h_lower <= g + 1e-9 && g <= env.h_upper + 1e-9, "{:?} vs {}", env, g);

        let gv = preprocess_variance(delta, &x).unwrap();
        prop_assert!((gv - variance(&x)).abs() <= variance_error_bound(delta, &x).unwrap() + 1e-9);
    }

    #[test]
    fn exact_inside_window(
        n in 1usize..80,
        delta in 0.01..10.0f64,
        mu_hat in -100.0..100.0f64,
        seed in prop::collection::vec(-1.0..=1.0f64, 80),
    ) {
        let half = n as f64 / 2.0 * delta;
        let x: Vec<f64> = seed[..n].iter().map(|s| mu_hat + s * half).collect();
        let spec = OrderedStatSpec::new(OrderedStatKind::Mean, mu_hat).unwrap();
        let g = preprocess_ordered(&spec, delta, &x).unwrap();
        prop_assert!((g - mean(&x)).abs() <= 1e-9);
    }
}

#[test]
fn window_statistics_use_sorted_windows() {
    // Upper from dropping the max, Lower from dropping the min.
    let spec = OrderedStatSpec::new(OrderedStatKind::Maximum, 0.0).unwrap();
    assert_eq!(preprocess_ordered(&spec, 1.0, &[0.0, 10.0]).unwrap(), 1.0);
    let spec = OrderedStatSpec::new(OrderedStatKind::Minimum, 0.0).unwrap();
    assert_eq!(preprocess_ordered(&spec, 1.0, &[-10.0, 0.0]).unwrap(), -1.0);
}
