use proptest::prelude::*;
use qdim::measure::{invariant_atoms_mid, w1_distance};
use qdim::quantizer::{lloyd, optimal_quantizer_dp, optimal_quantizer_dp_full};
use qdim::spectral::closed_form_sigma;
use qdim::verify::exhaustive_quantization;
use qdim::{AtomicMeasure, IfsModel, Interval, MapDescriptor, Word};

fn measure(max_atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((0.0f64..1.0, 0.05f64..1.0), 1..=max_atoms).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let (atoms, weights) = pairs.into_iter().map(|(x, w)| (x, w / total)).unzip();
        AtomicMeasure::new(atoms, weights).unwrap()
    })
}

/// Two disjoint affine maps on [0, 1] with random orientation.
fn affine_pair() -> impl Strategy<Value = IfsModel> {
    (0.05f64..0.45, 0.05f64..0.45, any::<bool>(), any::<bool>(), 0.1f64..0.9).prop_map(
        |(c1, c2, flip1, flip2, p)| {
            let m1 = if flip1 { MapDescriptor::affine(-c1, c1) } else { MapDescriptor::affine(c1, 0.0) };
            let m2 = if flip2 { MapDescriptor::affine(-c2, 1.0) } else { MapDescriptor::affine(c2, 1.0 - c2) };
            IfsModel::new(vec![m1, m2], vec![p, 1.0 - p], Interval::unit(), Some(vec![Interval::unit()]))
                .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w1_is_a_metric(a in measure(10), b in measure(10), c in measure(10)) {
        prop_assert!(w1_distance(&a, &a).abs() < 1e-15);
        prop_assert!((w1_distance(&a, &b) - w1_distance(&b, &a)).abs() < 1e-14);
        prop_assert!(w1_distance(&a, &c) <= w1_distance(&a, &b) + w1_distance(&b, &c) + 1e-14);
    }

    #[test]
    fn pushforward_keeps_mass(model in affine_pair(), mu in measure(12)) {
        let pushed = mu.pushforward(&model).unwrap();
        prop_assert!((pushed.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(pushed.atoms().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn dp_matches_exhaustive(mu in measure(8), n in 1usize..=3, r_is_two in any::<bool>()) {
        let r = if r_is_two { 2.0 } else { 1.0 };
        let dp = optimal_quantizer_dp(&mu, n, r).unwrap().error;
        let ex = exhaustive_quantization(&mu, n, r).unwrap();
        prop_assert!((dp - ex).abs() <= 1e-12, "dp {dp} exhaustive {ex}");
    }

    #[test]
    fn dp_matches_exhaustive_for_other_orders(mu in measure(6), n in 1usize..=2) {
        let dp = optimal_quantizer_dp(&mu, n, 3.0).unwrap().error;
        let ex = exhaustive_quantization(&mu, n, 3.0).unwrap();
        prop_assert!((dp - ex).abs() <= 1e-10, "dp {dp} exhaustive {ex}");
    }

    #[test]
    fn layered_dp_matches_full_dp(mu in measure(40), n in 1usize..=6, r in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let fast = optimal_quantizer_dp(&mu, n, r).unwrap().error;
        let full = optimal_quantizer_dp_full(&mu, n, r).unwrap().error;
        prop_assert!((fast - full).abs() <= 1e-12 * full.max(1e-300) + 1e-15);
    }

    #[test]
    fn lloyd_never_beats_dp(mu in measure(30), n in 1usize..=5, seed in any::<u64>()) {
        let dp = optimal_quantizer_dp(&mu, n, 2.0).unwrap().error;
        let heuristic = lloyd(&mu, n, 2.0, 3, seed).unwrap().error;
        prop_assert!(heuristic >= dp - 1e-14);
    }

    #[test]
    fn error_decreases_in_n(mu in measure(20)) {
        let v: Vec<f64> = (1..=6).map(|n| optimal_quantizer_dp(&mu, n, 2.0).unwrap().error).collect();
        prop_assert!(v.windows(2).all(|p| p[1] <= p[0] + 1e-15));
    }

    #[test]
    fn model_round_trip(model in affine_pair()) {
        let back = IfsModel::from_json(&model.to_json()).unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn level_weights_sum_to_one(model in affine_pair(), depth in 1usize..=8) {
        let total: f64 = model.enumerate_words(depth).unwrap().iter().map(|w| w.weight(model.probs())).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_root_solves_the_equation(model in affine_pair(), r in 0.5f64..3.0) {
        let ratios = model.similitude_ratios().unwrap();
        let sigma = closed_form_sigma(model.probs(), &ratios, r).unwrap();
        let s = sigma / (r + sigma);
        let sum: f64 = model.probs().iter().zip(&ratios).map(|(p, c)| (p * c.powf(r)).powf(s)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_splits_at_any_point(i in 0usize..2, j in 0usize..2, k in 0usize..2, x in 0.0f64..1.0) {
        let model = IfsModel::moebius_pair();
        let (w, t) = (Word::new(vec![i, j]), Word::new(vec![k]));
        let whole = model.df_word(&w.concat(&t), x);
        let split = model.df_word(&w, model.apply_word(&t, x)) * model.df_word(&t, x);
        prop_assert!((whole - split).abs() <= 1e-14 * whole);
    }
}

#[test]
fn invariant_atoms_are_self_similar() {
    let model = IfsModel::moebius_pair();
    let mu = invariant_atoms_mid(&model, 8).unwrap();
    let pushed = mu.pushforward(&model).unwrap();
    let next = invariant_atoms_mid(&model, 9).unwrap();
    assert!(w1_distance(&pushed, &next) < 1e-14);
}
