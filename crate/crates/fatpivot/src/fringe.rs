//! k-fringe-balanced search trees.
//!
//! Inner nodes hold distinct pivot values; leaves buffer up to `k - 1`
//! elements in insertion order. A leaf that reaches `k` elements splits:
//! the median of its buffer becomes a new inner node, every buffered
//! element is compared against it (the median's own copy included, one
//! equal outcome), duplicates of the median are dropped, and the rest move
//! into two fresh leaves.
//!
//! The same [`Tree`] doubles as the recursion tree of instrumented
//! quicksort: sorting a sequence and inserting it element by element
//! produce the same shape and the same multiset of partition comparisons.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::inputgen::{IidStream, Rng, Seed};
use crate::model::{ComparisonLedger, Error, Item, SampleParams, UniverseDistribution, Value};
use crate::quicksort::select_median;

/// A binary search tree whose leaves buffer elements in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Inner {
        pivot: Value,
        left: Box<Tree>,
        right: Box<Tree>,
    },
    Leaf(Vec<Item>),
}

impl Tree {
    pub fn empty() -> Self {
        Tree::Leaf(Vec::new())
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    /// Number of inner nodes on the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Inner { left, right, .. } => 1 + left.height().max(right.height()),
        }
    }

    pub fn inner_count(&self) -> u32 {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Inner { left, right, .. } => 1 + left.inner_count() + right.inner_count(),
        }
    }

    /// Canonical serialization: `Inner(p, L, R)` prints as `(p L R)`,
    /// `Leaf(buffer)` prints as `[b1 b2 ...]` in insertion order.
    pub fn shape_digest(&self) -> String {
        let mut out = String::new();
        self.write_digest(&mut out);
        out
    }

    fn write_digest(&self, out: &mut String) {
        match self {
            Tree::Leaf(buffer) => {
                out.push('[');
                for (i, it) in buffer.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&alloc::format!("{}", it.value));
                }
                out.push(']');
            }
            Tree::Inner { pivot, left, right } => {
                out.push('(');
                out.push_str(&alloc::format!("{pivot} "));
                left.write_digest(out);
                out.push(' ');
                right.write_digest(out);
                out.push(')');
            }
        }
    }
}

/// Result of searching a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    FoundAtInner,
    FoundInLeaf,
    Absent,
}

/// Search result: where the value was found and how many inner-node
/// comparisons the root-to-stop path used. Sequential search inside a leaf
/// buffer is not counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Search {
    pub outcome: SearchOutcome,
    pub path_cost: u32,
}

/// Searches `x`, counting one comparison per inner node on the path.
pub fn search(tree: &Tree, x: Value) -> Search {
    let mut cur = tree;
    let mut path_cost = 0;
    loop {
        match cur {
            Tree::Inner { pivot, left, right } => {
                path_cost += 1;
                match x.cmp(pivot) {
                    Ordering::Equal => {
                        return Search {
                            outcome: SearchOutcome::FoundAtInner,
                            path_cost,
                        }
                    }
                    Ordering::Less => cur = left,
                    Ordering::Greater => cur = right,
                }
            }
            Tree::Leaf(buffer) => {
                let outcome = if buffer.iter().any(|it| it.value == x) {
                    SearchOutcome::FoundInLeaf
                } else {
                    SearchOutcome::Absent
                };
                return Search { outcome, path_cost };
            }
        }
    }
}

/// Depths of the inner nodes of a saturated tree, indexed by value.
/// The root has depth 1 (both endpoints of the path are counted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDepthVector {
    depths: Vec<u32>,
}

impl NodeDepthVector {
    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    /// Depth of the node holding value `v` (1-based).
    pub fn depth(&self, v: Value) -> u32 {
        self.depths[(v - 1) as usize]
    }

    /// Weighted average depth against a probability vector.
    pub fn dot_weights(&self, weights: &[f64]) -> f64 {
        self.depths
            .iter()
            .zip(weights)
            .map(|(&d, &w)| f64::from(d) * w)
            .sum()
    }

    /// Weighted total depth against a multiplicity vector.
    pub fn dot_counts(&self, counts: &[u64]) -> u64 {
        self.depths
            .iter()
            .zip(counts)
            .map(|(&d, &c)| u64::from(d) * c)
            .sum()
    }
}

/// Depth of each inner node, for a tree saturated over `1..=u`.
///
/// Fails unless the tree has exactly `u` inner nodes labeled `1..=u`.
pub fn node_depths(tree: &Tree, u: u32) -> Result<NodeDepthVector, Error> {
    let mut depths = alloc::vec![0u32; u as usize];
    let mut seen = 0u32;
    let mut stack: Vec<(&Tree, u32)> = alloc::vec![(tree, 1)];
    while let Some((node, depth)) = stack.pop() {
        if let Tree::Inner { pivot, left, right } = node {
            if *pivot == 0 || *pivot > u || depths[(*pivot - 1) as usize] != 0 {
                return Err(Error::UnsaturatedTree);
            }
            depths[(*pivot - 1) as usize] = depth;
            seen += 1;
            stack.push((left, depth + 1));
            stack.push((right, depth + 1));
        }
    }
    if seen != u || depths.contains(&0) {
        return Err(Error::UnsaturatedTree);
    }
    Ok(NodeDepthVector { depths })
}

/// A fringe-balanced tree together with its sampling parameter, tracking
/// the number of inner nodes so saturation checks are O(1).
#[derive(Debug, Clone)]
pub struct FringeTree {
    root: Tree,
    params: SampleParams,
    inner_nodes: u32,
}

impl FringeTree {
    pub fn new(params: SampleParams) -> Self {
        FringeTree {
            root: Tree::empty(),
            params,
            inner_nodes: 0,
        }
    }

    pub fn root(&self) -> &Tree {
        &self.root
    }

    pub fn params(&self) -> SampleParams {
        self.params
    }

    pub fn inner_nodes(&self) -> u32 {
        self.inner_nodes
    }

    /// Saturated over `1..=u`: every universe value labels an inner node,
    /// all leaves are empty, and further insertions never change the tree.
    pub fn is_saturated(&self, u: u32) -> bool {
        self.inner_nodes == u
    }

    pub fn height(&self) -> u32 {
        self.root.height()
    }

    pub fn shape_digest(&self) -> String {
        self.root.shape_digest()
    }

    pub fn node_depths(&self, u: u32) -> Result<NodeDepthVector, Error> {
        node_depths(&self.root, u)
    }

    pub fn search(&self, x: Value) -> Search {
        search(&self.root, x)
    }

    /// Inserts one element. Descent comparisons are recorded as events; an
    /// insertion that meets its own value at an inner node leaves the tree
    /// unchanged. A full leaf splits around the median of its `k` buffered
    /// elements (selection cost counted as median comparisons, one event
    /// per buffered element, duplicates of the median dropped) and the
    /// split is counted as one partitioning step.
    pub fn insert(&mut self, item: Item, ledger: &mut ComparisonLedger) {
        let k = self.params.k() as usize;
        let t = self.params.t() as usize;
        let mut cur = &mut self.root;
        loop {
            match cur {
                Tree::Inner { pivot, left, right } => {
                    let outcome = item.value.cmp(pivot);
                    ledger.record_partition(item.id, *pivot, outcome);
                    match outcome {
                        Ordering::Equal => return, // tree unchanged
                        Ordering::Less => cur = left.as_mut(),
                        Ordering::Greater => cur = right.as_mut(),
                    }
                }
                Tree::Leaf(buffer) => {
                    buffer.push(item);
                    if buffer.len() < k {
                        return;
                    }
                    // Split: the buffer holds exactly k elements.
                    let pivot = {
                        let mut values = [0 as Value; 32];
                        if k <= values.len() {
                            for (dst, it) in values[..k].iter_mut().zip(buffer.iter()) {
                                *dst = it.value;
                            }
                            select_median(&values[..k], ledger)
                        } else {
                            let values: Vec<Value> = buffer.iter().map(|it| it.value).collect();
                            select_median(&values, ledger)
                        }
                    };
                    ledger.steps += 1;
                    // Partition in place, reusing the buffer's allocation
                    // for the smaller side; duplicates of the median drop.
                    let mut smaller = core::mem::take(buffer);
                    let mut larger = Vec::with_capacity(t);
                    let mut keep = 0;
                    for read in 0..smaller.len() {
                        let it = smaller[read];
                        let outcome = it.value.cmp(&pivot);
                        ledger.record_partition(it.id, pivot, outcome);
                        match outcome {
                            Ordering::Less => {
                                smaller[keep] = it;
                                keep += 1;
                            }
                            Ordering::Greater => larger.push(it),
                            Ordering::Equal => {}
                        }
                    }
                    smaller.truncate(keep);
                    *cur = Tree::Inner {
                        pivot,
                        left: Box::new(Tree::Leaf(smaller)),
                        right: Box::new(Tree::Leaf(larger)),
                    };
                    self.inner_nodes += 1;
                    return;
                }
            }
        }
    }

    /// Inserts a whole sequence in order.
    pub fn insert_all(&mut self, items: &[Item], ledger: &mut ComparisonLedger) {
        for &item in items {
            self.insert(item, ledger);
        }
    }
}

/// Inserts iid draws from `q` until every universe value labels an inner
/// node, returning the saturated tree and the number of insertions used.
pub fn build_until_saturated(
    q: &UniverseDistribution,
    params: SampleParams,
    seed: Seed,
    max_insertions: u64,
) -> Result<(FringeTree, u64), Error> {
    build_until_saturated_with(q, params, Rng::new(seed), max_insertions)
}

/// As [`build_until_saturated`], but from an explicit generator state
/// (used for per-trial streams).
pub fn build_until_saturated_with(
    q: &UniverseDistribution,
    params: SampleParams,
    rng: Rng,
    max_insertions: u64,
) -> Result<(FringeTree, u64), Error> {
    let u = q.universe_size();
    let mut tree = FringeTree::new(params);
    let mut ledger = ComparisonLedger::counting_only();
    let mut stream = IidStream::new(q.clone(), rng);
    let mut used = 0;
    while !tree.is_saturated(u) {
        if used >= max_insertions {
            return Err(Error::SaturationBudget {
                budget: max_insertions,
            });
        }
        tree.insert(stream.next_item(), &mut ledger);
        used += 1;
    }
    Ok((tree, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InputSequence;

    fn insert_values(values: &[Value], k: u32) -> (FringeTree, ComparisonLedger) {
        let params = SampleParams::with_k(k).unwrap();
        let seq = InputSequence::from_values(values.iter().copied());
        let mut tree = FringeTree::new(params);
        let mut ledger = ComparisonLedger::new();
        tree.insert_all(seq.items(), &mut ledger);
        (tree, ledger)
    }

    /// The example tree with node depths (3, 2, 3, 1, 2): root 4, children
    /// 2 and 5, and 2 has children 1 and 3.
    fn example_tree() -> FringeTree {
        let (tree, _) = insert_values(&[4, 2, 5, 1, 3], 1);
        assert_eq!(tree.shape_digest(), "(4 (2 (1 [] []) (3 [] [])) (5 [] []))");
        tree
    }

    #[test]
    fn first_insert_is_free() {
        let (tree, ledger) = insert_values(&[1], 3);
        assert_eq!(tree.shape_digest(), "[1]");
        assert_eq!(ledger.total_cmps(), 0);
    }

    #[test]
    fn bst_insertion_matches_known_shape() {
        let (tree, _) = insert_values(&[7, 4, 2, 9, 1, 3, 8, 5, 6], 1);
        assert_eq!(
            tree.shape_digest(),
            "(7 (4 (2 (1 [] []) (3 [] [])) (5 [] (6 [] []))) (9 (8 [] []) []))"
        );
    }

    #[test]
    fn triple_duplicate_split_drops_copies() {
        let (tree, ledger) = insert_values(&[1, 1, 1], 3);
        assert_eq!(tree.shape_digest(), "(1 [] [])");
        assert_eq!(ledger.steps, 1);
        // Split compares all three buffered copies against the median.
        assert_eq!(ledger.partition_cmps, 3);
        assert!(ledger
            .events()
            .unwrap()
            .iter()
            .all(|e| e.outcome == Ordering::Equal));
    }

    #[test]
    fn duplicate_insertion_at_inner_node_is_a_no_op() {
        let (mut tree, _) = insert_values(&[2, 1, 3], 1);
        let before = tree.shape_digest();
        let mut ledger = ComparisonLedger::new();
        tree.insert(Item { value: 2, id: 99 }, &mut ledger);
        assert_eq!(tree.shape_digest(), before);
        assert_eq!(ledger.partition_cmps, 1);
    }

    #[test]
    fn search_costs_match_node_depths() {
        let tree = example_tree();
        let s = tree.search(3);
        assert_eq!(s.outcome, SearchOutcome::FoundAtInner);
        assert_eq!(s.path_cost, 3);
        let s = tree.search(4);
        assert_eq!(s.path_cost, 1);

        let depths = tree.node_depths(5).unwrap();
        assert_eq!(depths.depths(), &[3, 2, 3, 1, 2]);
        for v in 1..=5 {
            assert_eq!(tree.search(v).path_cost, depths.depth(v));
        }
    }

    #[test]
    fn search_in_leaf_only_tree_costs_nothing() {
        let (tree, _) = insert_values(&[2, 1], 5);
        let s = tree.search(1);
        assert_eq!(s.outcome, SearchOutcome::FoundInLeaf);
        assert_eq!(s.path_cost, 0);
        let s = tree.search(3);
        assert_eq!(s.outcome, SearchOutcome::Absent);
        assert_eq!(s.path_cost, 0);
    }

    #[test]
    fn height_counts_inner_nodes_on_longest_path() {
        assert_eq!(Tree::empty().height(), 0);
        assert_eq!(example_tree().height(), 3);
        let (chain, _) = insert_values(&[1, 2, 3, 4], 1);
        assert_eq!(chain.height(), 4);
    }

    #[test]
    fn digest_formats_match_convention() {
        assert_eq!(Tree::empty().shape_digest(), "[]");
        let (tree, _) = insert_values(&[2, 1], 3);
        // Buffer [2, 1] splits only at the third insertion, so still a leaf.
        assert_eq!(tree.shape_digest(), "[2 1]");
        let (tree, _) = insert_values(&[2, 1, 3], 3);
        assert_eq!(tree.shape_digest(), "(2 [1] [3])");
    }

    #[test]
    fn node_depths_rejects_unsaturated_trees() {
        let (tree, _) = insert_values(&[2, 1, 3], 1);
        assert!(tree.node_depths(5).is_err());
        let single = insert_values(&[1], 1).0;
        assert_eq!(single.node_depths(1).unwrap().depths(), &[1]);
    }

    #[test]
    fn saturation_of_singleton_universe_takes_k_insertions() {
        for k in [1u32, 3, 5, 7] {
            let q = UniverseDistribution::from_weights(&[1.0]).unwrap();
            let params = SampleParams::with_k(k).unwrap();
            let (tree, used) = build_until_saturated(&q, params, Seed(5), 10_000).unwrap();
            assert_eq!(used, u64::from(k));
            assert_eq!(tree.shape_digest(), "(1 [] [])");
        }
    }

    #[test]
    fn saturated_trees_have_empty_leaves() {
        fn leaves_empty(tree: &Tree) -> bool {
            match tree {
                Tree::Leaf(buffer) => buffer.is_empty(),
                Tree::Inner { left, right, .. } => leaves_empty(left) && leaves_empty(right),
            }
        }
        for (u, k, seed) in [(6u32, 3u32, 0u64), (10, 1, 1), (4, 5, 2)] {
            let q = UniverseDistribution::uniform(u);
            let params = SampleParams::with_k(k).unwrap();
            let (tree, _) = build_until_saturated(&q, params, Seed(seed), 1_000_000).unwrap();
            assert!(leaves_empty(tree.root()), "u={u} k={k}");
            // Further insertions never change a saturated tree.
            let digest = tree.shape_digest();
            let mut tree = tree;
            let mut ledger = ComparisonLedger::counting_only();
            for (i, v) in (1..=u).cycle().take(3 * u as usize).enumerate() {
                tree.insert(
                    Item {
                        value: v,
                        id: 1_000_000 + i as u32,
                    },
                    &mut ledger,
                );
            }
            assert_eq!(tree.shape_digest(), digest);
        }
    }

    #[test]
    fn saturation_budget_error() {
        let q = UniverseDistribution::uniform(8);
        let params = SampleParams::with_k(3).unwrap();
        let err = build_until_saturated(&q, params, Seed(5), 3).unwrap_err();
        assert_eq!(err, Error::SaturationBudget { budget: 3 });
    }
}
