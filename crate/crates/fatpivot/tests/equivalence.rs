//! Sorting a sequence with instrumented median-of-k quicksort and inserting
//! the same sequence into a k-fringe-balanced tree execute the same set of
//! ternary key comparisons and produce the same tree shape. These tests
//! exercise that correspondence exhaustively on small inputs, randomly at
//! scale, and on adversarial patterns.

use proptest::prelude::*;

use fatpivot::fringe::FringeTree;
use fatpivot::model::{ComparisonLedger, InputSequence, SampleParams, Value};
use fatpivot::quicksort::{quicksort_k, sedgewick_count};

fn insertion_tree(seq: &InputSequence, params: SampleParams) -> (FringeTree, ComparisonLedger) {
    let mut tree = FringeTree::new(params);
    let mut ledger = ComparisonLedger::new();
    tree.insert_all(seq.items(), &mut ledger);
    (tree, ledger)
}

fn assert_equivalent(values: &[Value], k: u32) {
    let params = SampleParams::with_k(k).unwrap();
    let seq = InputSequence::from_values(values.iter().copied());
    let sort = quicksort_k(&seq, params);
    let (tree, insert_ledger) = insertion_tree(&seq, params);

    assert_eq!(
        sort.tree.shape_digest(),
        tree.shape_digest(),
        "tree shapes differ for k={k}, input {values:?}"
    );
    assert_eq!(
        sort.ledger.event_multiset().unwrap(),
        insert_ledger.event_multiset().unwrap(),
        "comparison events differ for k={k}, input {values:?}"
    );
    // Splits replay the partitioning steps one-to-one, so the side
    // categories coincide as well.
    assert_eq!(sort.ledger.steps, insert_ledger.steps);
    assert_eq!(sort.ledger.median_cmps, insert_ledger.median_cmps);
}

#[test]
fn equivalence_on_fixed_patterns() {
    for k in [1u32, 3, 5, 7] {
        assert_equivalent(&[7, 4, 2, 9, 1, 3, 8, 5, 6], k);
        assert_equivalent(&[5, 5, 5, 5, 5, 5, 5], k); // all equal
        assert_equivalent(&(1..=30).collect::<Vec<_>>(), k); // sorted
        assert_equivalent(&(1..=30).rev().collect::<Vec<_>>(), k); // reversed
        assert_equivalent(&[2, 1, 2, 1, 2, 1, 2, 1], k); // alternating duplicates
        assert_equivalent(&[1], k);
        assert_equivalent(&[], k);
    }
}

#[test]
fn equivalence_below_sample_size_is_a_single_leaf() {
    let params = SampleParams::with_k(5).unwrap();
    let seq = InputSequence::from_values([3, 1, 3]);
    let sort = quicksort_k(&seq, params);
    let (tree, ledger) = insertion_tree(&seq, params);
    assert_eq!(sort.tree.shape_digest(), "[3 1 3]");
    assert_eq!(tree.shape_digest(), "[3 1 3]");
    assert!(sort.ledger.events().unwrap().is_empty());
    assert!(ledger.events().unwrap().is_empty());
}

#[test]
fn equivalence_exhaustive_on_tiny_inputs() {
    // Every sequence over universe {1,2,3} up to length 5, for k in {1,3}.
    for k in [1u32, 3] {
        for n in 0..=5usize {
            let mut values = vec![1u32; n];
            loop {
                assert_equivalent(&values, k);
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if values[pos] < 3 {
                        values[pos] += 1;
                        break;
                    }
                    values[pos] = 1;
                }
                if values.iter().all(|&v| v == 1) {
                    break;
                }
            }
            if n == 0 {
                continue;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn equivalence_randomized(
        k in prop::sample::select(vec![1u32, 3, 5]),
        u in 1u32..=8,
        values in prop::collection::vec(1u32..=8, 1..200),
    ) {
        let values: Vec<Value> = values.into_iter().map(|v| (v - 1) % u + 1).collect();
        assert_equivalent(&values, k);
    }

    #[test]
    fn sort_is_correct_stable_and_step_bounded(
        k in prop::sample::select(vec![1u32, 3, 5, 9]),
        values in prop::collection::vec(1u32..=6, 0..120),
    ) {
        let params = SampleParams::with_k(k).unwrap();
        let seq = InputSequence::from_values(values.iter().copied());
        let out = quicksort_k(&seq, params);

        // Permutation: same ids, nothing lost.
        let mut in_ids: Vec<u32> = seq.items().iter().map(|it| it.id).collect();
        let mut out_ids: Vec<u32> = out.sorted.items().iter().map(|it| it.id).collect();
        in_ids.sort_unstable();
        out_ids.sort_unstable();
        prop_assert_eq!(in_ids, out_ids);

        // Non-decreasing, and stable within equal keys.
        for w in out.sorted.items().windows(2) {
            prop_assert!(w[0].value <= w[1].value);
            if w[0].value == w[1].value {
                prop_assert!(w[0].id < w[1].id);
            }
        }

        // Each universe value pivots at most one partitioning step.
        let distinct = {
            let mut vs = values.clone();
            vs.sort_unstable();
            vs.dedup();
            vs.len() as u64
        };
        prop_assert!(out.ledger.steps <= distinct);

        // The ledgers stay internally consistent.
        prop_assert_eq!(
            out.ledger.events().unwrap().len() as u64,
            out.ledger.partition_cmps
        );
        prop_assert!(sedgewick_count(&out.ledger).is_ok());
    }

    #[test]
    fn duplicate_reinsertion_never_changes_shape(
        k in prop::sample::select(vec![1u32, 3, 5]),
        values in prop::collection::vec(1u32..=5, 1..60),
    ) {
        let params = SampleParams::with_k(k).unwrap();
        let seq = InputSequence::from_values(values.iter().copied());
        let (mut tree, _) = insertion_tree(&seq, params);
        // Re-inserting any value already held by an inner node is a no-op.
        for v in 1..=5u32 {
            let before = tree.shape_digest();
            let is_inner = matches!(
                tree.search(v).outcome,
                fatpivot::SearchOutcome::FoundAtInner
            );
            let mut ledger = ComparisonLedger::counting_only();
            tree.insert(fatpivot::Item { value: v, id: 10_000 + v }, &mut ledger);
            if is_inner {
                prop_assert_eq!(tree.shape_digest(), before);
            }
        }
    }
}

/// Quantitative insert-vs-search correspondence: once every universe value
/// appears at least k times, the tree is saturated and the partition
/// comparisons of a sort differ from the weighted node depths by at most
/// `(c_med + 2) * k * u` with `c_med = (k-1)/2` (the insertion-sort
/// median-selection constant).
#[test]
fn partition_cost_tracks_weighted_node_depths() {
    use fatpivot::inputgen::{shuffle_multiset, Seed};
    use fatpivot::model::Profile;

    for (k, u, copies) in [(1u32, 5u32, 4u64), (3, 6, 5), (5, 4, 9), (3, 8, 3)] {
        let params = SampleParams::with_k(k).unwrap();
        for seed in 0..40u64 {
            let profile = Profile::new(vec![copies.max(u64::from(k)); u as usize]);
            let seq = shuffle_multiset(&profile, Seed(seed)).unwrap();
            let out = quicksort_k(&seq, params);
            let depths = fatpivot::fringe::node_depths(&out.tree, u).unwrap();
            let weighted = depths.dot_counts(profile.counts()) as f64;
            let slack = (params.median_cost_factor() + 2.0) * f64::from(k) * f64::from(u);
            let diff = (out.ledger.partition_cmps as f64 - weighted).abs();
            assert!(
                diff <= slack,
                "k={k} u={u} seed={seed}: |{} - {weighted}| > {slack}",
                out.ledger.partition_cmps
            );
        }
    }
}

/// Saturated trees answer searches at exactly their node depths.
#[test]
fn search_costs_equal_node_depths_after_saturation() {
    use fatpivot::fringe::build_until_saturated;
    use fatpivot::inputgen::Seed;
    use fatpivot::model::UniverseDistribution;

    for (u, k) in [(1u32, 1u32), (5, 3), (8, 5), (12, 1)] {
        let q = UniverseDistribution::uniform(u);
        let params = SampleParams::with_k(k).unwrap();
        let (tree, _) = build_until_saturated(&q, params, Seed(1234), 1_000_000).unwrap();
        let depths = tree.node_depths(u).unwrap();
        for v in 1..=u {
            assert_eq!(tree.search(v).path_cost, depths.depth(v));
        }
    }
}
