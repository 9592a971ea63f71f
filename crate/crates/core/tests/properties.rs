mod common;

use proptest::prelude::*;

use common::*;
use expander_codes::decode::{
    deep_flip, derive_params, hard_search, main_decode, randomized::sample_flip_set, randomized_decode,
    DecodeState, DecoderParams, RandDecodeConfig, SearchOptions,
};
use expander_codes::tanner::{corrupt, Manifest};
use expander_codes::{BipartiteGraph, BitVector, InnerCode, TannerCode};

fn hamming_code(n: usize, seed: u64) -> TannerCode {
    let g = BipartiteGraph::random_biregular(2, 7, n, seed).unwrap();
    TannerCode::new(g, InnerCode::hamming_7_4().unwrap()).unwrap()
}

fn loose_params(code: &TannerCode) -> DecoderParams {
    let g = code.graph();
    let n = code.len();
    derive_params(g.c(), g.d(), 1.0 / n as f64, 1.0, code.inner().distance(), n).unwrap()
}

fn arb_word(n: usize) -> impl Strategy<Value = BitVector> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|b| BitVector::from_bools(&b))
}

/// A small code with a nontrivial dimension, and a word for it.
fn arb_code_and_word() -> impl Strategy<Value = (TannerCode, BitVector)> {
    (1usize..6, 0u64..8).prop_flat_map(|(k, seed)| {
        let code = hamming_code(7 * k, seed);
        let n = code.len();
        (Just(code), arb_word(n))
    })
}

fn arb_ehamming_state() -> impl Strategy<Value = (TannerCode, BitVector)> {
    (0u64..6, 0usize..60, any::<u64>()).prop_map(|(seed, w, eseed)| {
        let g = BipartiteGraph::random_biregular(6, 8, 64, seed).unwrap();
        let code = TannerCode::new(g, InnerCode::extended_hamming_8_4().unwrap()).unwrap();
        let x = corrupt(&BitVector::zeros(64), w, eseed).unwrap();
        (code, x)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_state_matches_a_fresh_one(
        (code, x) in arb_ehamming_state(),
        flips in proptest::collection::vec(proptest::collection::btree_set(0u32..64, 0..12), 1..6),
    ) {
        let mut state = DecodeState::new(&code, 1, x).unwrap();
        for set in flips {
            let set: Vec<u32> = set.into_iter().collect();
            state.flip_set(&set);
            state.assert_consistent();
            let fresh = DecodeState::new(&code, 1, state.word().clone()).unwrap();
            prop_assert_eq!(state.unsatisfied(), fresh.unsatisfied());
            prop_assert_eq!(state.unsatisfied(), code.unsatisfied(state.word()).unwrap());
            for m in 1..=code.graph().c() {
                let mut a = state.bucket(m).to_vec();
                let mut b = fresh.bucket(m).to_vec();
                a.sort_unstable();
                b.sort_unstable();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn easy_flip_changes_exactly_its_bucket((code, x) in arb_ehamming_state(), m in 1usize..=6) {
        let mut state = DecodeState::new(&code, 1, x.clone()).unwrap();
        let mut expected: Vec<usize> = state.bucket(m).iter().map(|&v| v as usize).collect();
        expected.sort_unstable();
        for u in 0..code.graph().n_right() {
            if let Some(v) = state.vote_target(u) {
                prop_assert!(code.graph().right_neighbors(u).contains(&(v as u32)));
            }
        }
        state.easy_flip(m);
        let changed: Vec<usize> = state.word().add(&x).unwrap().ones_iter().collect();
        prop_assert_eq!(changed, expected);
    }

    #[test]
    fn deep_flip_restores_its_input(
        (code, x) in arb_ehamming_state(),
        seq in proptest::collection::vec(1usize..=6, 1..12),
    ) {
        let params = derive_params(6, 8, 0.1, 0.8, 4, 64).unwrap();
        let mut state = DecodeState::new(&code, params.t, x.clone()).unwrap();
        deep_flip(&mut state, &params, &seq);
        let mut back = state.word().clone();
        back.add_assign(state.flip_record()).unwrap();
        prop_assert_eq!(&back, &x);
        state.restore_flip_record();
        prop_assert_eq!(state.word(), &x);
        state.assert_consistent();
    }

    #[test]
    fn hard_search_accepts_only_shrinking_branches((code, x) in arb_ehamming_state()) {
        let params = derive_params(6, 8, 0.1, 0.8, 4, 64).unwrap();
        let mut state = DecodeState::new(&code, params.t, x.clone()).unwrap();
        let before = state.unsat_count();
        match hard_search(&mut state, &params, &SearchOptions::default()) {
            Ok(stats) => {
                prop_assert_eq!(stats.input_unsat, before);
                prop_assert!(params.accepts(state.unsat_count(), before));
            }
            Err(_) => prop_assert_eq!(state.word(), &x),
        }
        state.assert_consistent();
    }

    #[test]
    fn decoders_commute_with_adding_a_codeword((code, x) in arb_code_and_word(), cseed: u64, rseed: u64) {
        let params = loose_params(&code);
        let y = code.random_codeword(cseed);
        let shifted = x.add(&y).unwrap();

        let a = main_decode(&code, &params, &x);
        let b = main_decode(&code, &params, &shifted);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.add(&y).unwrap(), b),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }

        let cfg = RandDecodeConfig::from_params(&params, rseed).unwrap();
        let a = randomized_decode(&code, &params, &cfg, &x);
        let b = randomized_decode(&code, &params, &cfg, &shifted);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.add(&y).unwrap(), b);
        }
    }

    #[test]
    fn decoded_words_are_codewords((code, x) in arb_code_and_word()) {
        let params = loose_params(&code);
        if let Ok(y) = main_decode(&code, &params, &x) {
            prop_assert!(code.is_codeword(&y).unwrap());
        }
    }

    #[test]
    fn sampled_flip_sets_are_reproducible_subsets(
        sets in proptest::collection::vec(proptest::collection::btree_set(0u32..500, 0..40), 4),
        seed: u64,
        stream in 0u64..100,
    ) {
        // make the buckets disjoint
        let mut used = std::collections::BTreeSet::new();
        let buckets: Vec<Vec<u32>> = sets
            .into_iter()
            .map(|s| s.into_iter().filter(|v| used.insert(*v)).collect())
            .collect();
        let refs: Vec<&[u32]> = buckets.iter().map(Vec::as_slice).collect();
        let p = sample_flip_set(&refs, 4, seed, stream);
        prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.iter().all(|v| used.contains(v)));
        prop_assert_eq!(&p, &sample_flip_set(&refs, 4, seed, stream));
        let reversed: Vec<Vec<u32>> = buckets.iter().map(|b| b.iter().rev().copied().collect()).collect();
        let refs: Vec<&[u32]> = reversed.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(&p, &sample_flip_set(&refs, 4, seed, stream));
    }

    #[test]
    fn corrupt_flips_exactly_weight(x in arb_word(50), w in 0usize..=50, seed: u64) {
        let y = corrupt(&x, w, seed).unwrap();
        prop_assert_eq!(x.hamming_distance(&y).unwrap(), w);
        prop_assert_eq!(y, corrupt(&x, w, seed).unwrap());
    }

    #[test]
    fn text_formats_round_trip((code, x) in arb_code_and_word()) {
        prop_assert_eq!(x.to_string().parse::<BitVector>().unwrap(), x);
        let g = code.graph();
        let g2 = BipartiteGraph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(g2.to_text(), g.to_text());
        let inner = InnerCode::from_text(&code.inner().to_text()).unwrap();
        prop_assert_eq!(&inner, code.inner());
    }
}

#[test]
fn bundle_round_trip_preserves_membership() {
    let dir = tempfile::tempdir().unwrap();
    let code = hamming_code(35, 3);
    let path = Manifest::save(&code, dir.path(), "bundle").unwrap();
    let loaded = Manifest::load(&path).unwrap();
    assert_eq!(loaded.graph().to_text(), code.graph().to_text());
    assert_eq!(loaded.dimension(), code.dimension());
    for seed in 0..8 {
        let y = code.random_codeword(seed);
        assert!(loaded.is_codeword(&y).unwrap());
    }
}

#[test]
fn flip_set_sizes_match_their_expectation() {
    // all variables in S_c: each is picked with probability 1/2
    let bucket: Vec<u32> = (0..400).collect();
    let empty: &[u32] = &[];
    let refs = [empty, empty, &bucket[..]];
    let draws = 2000u64;
    let total: usize = (0..draws).map(|s| sample_flip_set(&refs, 3, s, 0).len()).sum();
    let mean = total as f64 / draws as f64;
    // sd of the mean: sqrt(400 / 4 / 2000)
    assert!((mean - 200.0).abs() < 3.0 * (100.0f64 / draws as f64).sqrt(), "mean {mean}");
}

#[test]
fn within_radius_errors_decode_at_scale() {
    let g = BipartiteGraph::random_biregular(12, 8, 2000, 11).unwrap();
    let code = TannerCode::new(g, InnerCode::extended_hamming_8_4().unwrap()).unwrap();
    let params = derive_params(12, 8, 0.1, 0.8, 4, 2000).unwrap();
    let zero = BitVector::zeros(2000);
    for seed in 0..50 {
        let x = corrupt(&zero, 1 + seed as usize % 17, seed).unwrap();
        assert_eq!(main_decode(&code, &params, &x).unwrap(), zero, "seed {seed}");
    }
}

#[test]
fn fixtures_expand_as_claimed() {
    let fx = verified_random(12, 8, 30, &InnerCode::extended_hamming_8_4().unwrap(), 0.1, 0.6, 1);
    assert!(fx[0].delta > 0.6);
    assert_eq!(expansion_delta(&k32(), 1.0 / 3.0), 1.0);
}
