//! Randomized invariants over model families and algorithm outputs.

use noisyrank::{
    knockout, mallows_pairwise, merge_rank, seq_error, Arena, Ctx, ElementId, PreferenceModel,
    RngFactory, Tally,
};
use proptest::prelude::*;

fn ids(n: usize) -> Vec<ElementId> {
    (1..=n).map(ElementId).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // p(i, j) + p(j, i) = 1 across every family.
    #[test]
    fn win_probabilities_are_complementary(
        n in 2usize..12,
        p in 0.5f64..1.0,
        phi in 0.05f64..0.95,
        weights in proptest::collection::vec(0.1f64..10.0, 2..12),
    ) {
        let models = [
            PreferenceModel::adjacent_gap(n, p).unwrap(),
            PreferenceModel::mallows(n, phi).unwrap(),
            PreferenceModel::btl(weights).unwrap(),
        ];
        for m in &models {
            for i in 1..=m.n() {
                for j in 1..=m.n() {
                    let (i, j) = (ElementId(i), ElementId(j));
                    prop_assert!((m.prob(i, j) + m.prob(j, i) - 1.0).abs() < 1e-12);
                    prop_assert!((0.0..=1.0).contains(&m.prob(i, j)));
                }
            }
        }
    }

    // The Mallows marginal favors the better rank and strengthens with
    // the rank gap.
    #[test]
    fn mallows_marginal_monotone_in_gap(phi in 0.05f64..0.99) {
        let mut prev = 0.5;
        for gap in 1usize..20 {
            let p = mallows_pairwise(phi, 1, 1 + gap).unwrap();
            prop_assert!(p > 0.5);
            prop_assert!(p >= prev - 1e-12);
            prev = p;
        }
    }

    // Ranking outputs are permutations of their input, whatever the seed.
    #[test]
    fn merge_rank_permutes_input(n in 2usize..20, seed in 0u64..1000) {
        let model = PreferenceModel::adjacent_gap(n, 0.6).unwrap();
        let arena = Arena::new(&model);
        let tally = Tally::new();
        let ctx = Ctx::new(&arena, &tally);
        let out = merge_rank(ctx, &ids(n), 0.2, 0.2, &RngFactory::new(seed)).unwrap();
        let mut sorted = out.clone();
        sorted.sort();
        prop_assert_eq!(sorted, ids(n));
        prop_assert!(tally.total() > 0);
    }

    // Knockout returns a real input element, never a padding dummy.
    #[test]
    fn knockout_returns_an_input_element(n in 2usize..20, seed in 0u64..1000) {
        let model = PreferenceModel::adjacent_gap(n, 0.7).unwrap();
        let mut arena = Arena::new(&model);
        let tally = Tally::new();
        let out = knockout(&mut arena, &tally, &ids(n), 0.1, 0.2, 1.0, &RngFactory::new(seed))
            .unwrap();
        prop_assert!((1..=n).contains(&out.0));
    }

    // Reversing a sequence flips the sign of a nonzero error measure.
    #[test]
    fn seq_error_antisymmetric_under_reversal(n in 2usize..12, seed in 0u64..100) {
        use rand::seq::SliceRandom;
        let model = PreferenceModel::adjacent_gap(n, 0.6).unwrap();
        let mut seq = ids(n);
        seq.shuffle(&mut RngFactory::new(seed).stream());
        let forward = seq_error(&seq, &model);
        seq.reverse();
        let backward = seq_error(&seq, &model);
        // adjacent-gap margins are all 0.1, so any order has error 0.1 one
        // way and -0.1 the other
        prop_assert!((forward + backward).abs() < 1e-12 || (forward - backward).abs() < 1e-12);
        prop_assert!(forward.abs() > 0.0);
    }
}
