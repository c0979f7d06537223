//! Instrumented fat-pivot median-of-k quicksort on order-preserving lists.
//!
//! Each partitioning step picks the median of the **first** `k` elements of
//! the sublist as pivot, compares every element of the sublist against it
//! (the pivot element included, so a step on `m` elements costs exactly `m`
//! ternary comparisons), appends elements to a smaller / equal / larger
//! list preserving relative order, finalizes the equal segment, and
//! recurses on the two strict segments. Sublists of at most `k - 1`
//! elements go to an instrumented insertion sort instead.
//!
//! The recursion tree is captured: one inner node per partitioning step,
//! labeled with the pivot value; insertion-sorted sublists become leaves
//! buffering their elements in arrival order. Partition comparisons are
//! logged as events; median-selection and insertion-sort comparisons are
//! counted but never logged.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::fringe::Tree;
use crate::model::{ComparisonLedger, Error, InputSequence, Item, SampleParams, Value};

/// Result of one sort: the stably sorted sequence, the recursion tree, and
/// the comparison ledger.
#[derive(Debug, Clone)]
pub struct SortOutcome {
    pub sorted: InputSequence,
    pub tree: Tree,
    pub ledger: ComparisonLedger,
}

/// Sorts with full event logging.
///
/// ```
/// use fatpivot::{quicksort_k, InputSequence, SampleParams};
///
/// let seq = InputSequence::from_values([2, 3, 1, 2]);
/// let out = quicksort_k(&seq, SampleParams::with_k(1).unwrap());
/// assert_eq!(out.sorted.values().collect::<Vec<_>>(), vec![1, 2, 2, 3]);
/// // One ternary comparison per element per partitioning step.
/// assert_eq!(out.ledger.partition_cmps, 4 + 1 + 1);
/// assert_eq!(out.ledger.steps, 3);
/// ```
pub fn quicksort_k(seq: &InputSequence, params: SampleParams) -> SortOutcome {
    let mut ledger = ComparisonLedger::new();
    let (sorted, tree) = quicksort_k_with(seq, params, &mut ledger);
    SortOutcome {
        sorted,
        tree,
        ledger,
    }
}

/// Sorts into a caller-provided ledger (which may be counting-only).
pub fn quicksort_k_with(
    seq: &InputSequence,
    params: SampleParams,
    ledger: &mut ComparisonLedger,
) -> (InputSequence, Tree) {
    let items: Vec<Item> = seq.items().to_vec();
    let mut out = Vec::with_capacity(items.len());
    let tree = sort_rec(items, params, ledger, &mut out);
    (InputSequence::from_items(out), tree)
}

fn sort_rec(
    items: Vec<Item>,
    params: SampleParams,
    ledger: &mut ComparisonLedger,
    out: &mut Vec<Item>,
) -> Tree {
    let k = params.k() as usize;
    if items.len() < k {
        out.extend(insertion_sort(&items, ledger));
        return Tree::Leaf(items);
    }

    let sample: Vec<Value> = items[..k].iter().map(|it| it.value).collect();
    let pivot = select_median(&sample, ledger);
    ledger.steps += 1;

    let mut smaller = Vec::new();
    let mut equal = Vec::new();
    let mut larger = Vec::new();
    for it in items {
        let outcome = it.value.cmp(&pivot);
        ledger.record_partition(it.id, pivot, outcome);
        match outcome {
            Ordering::Less => smaller.push(it),
            Ordering::Equal => equal.push(it),
            Ordering::Greater => larger.push(it),
        }
    }

    let left = sort_rec(smaller, params, ledger, out);
    out.extend(equal);
    let right = sort_rec(larger, params, ledger, out);
    Tree::Inner {
        pivot,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Median of an odd-length sample by instrumented insertion sort: the
/// element of rank `t + 1`. Costs at most `k(k-1)/2` ternary comparisons,
/// all charged to `median_cmps` and kept out of the event log.
pub fn select_median(sample: &[Value], ledger: &mut ComparisonLedger) -> Value {
    debug_assert!(sample.len() % 2 == 1);
    // Splits happen once per distinct value, so keep this allocation-free
    // for every practical sample size.
    let mut stack = [0 as Value; 32];
    if sample.len() <= stack.len() {
        let scratch = &mut stack[..sample.len()];
        scratch.copy_from_slice(sample);
        median_by_insertion(scratch, ledger)
    } else {
        let mut scratch = sample.to_vec();
        median_by_insertion(&mut scratch, ledger)
    }
}

fn median_by_insertion(scratch: &mut [Value], ledger: &mut ComparisonLedger) -> Value {
    for i in 1..scratch.len() {
        let v = scratch[i];
        let mut pos = i;
        while pos > 0 {
            ledger.median_cmps += 1;
            if v < scratch[pos - 1] {
                pos -= 1;
            } else {
                break;
            }
        }
        scratch.copy_within(pos..i, pos + 1);
        scratch[pos] = v;
    }
    scratch[scratch.len() / 2]
}

/// Stable instrumented insertion sort; every ternary comparison is charged
/// to `insertionsort_cmps`.
fn insertion_sort(items: &[Item], ledger: &mut ComparisonLedger) -> Vec<Item> {
    let mut sorted: Vec<Item> = Vec::with_capacity(items.len());
    for &it in items {
        let mut pos = sorted.len();
        while pos > 0 {
            ledger.insertionsort_cmps += 1;
            if it.value < sorted[pos - 1].value {
                pos -= 1;
            } else {
                break;
            }
        }
        sorted.insert(pos, it);
    }
    sorted
}

/// Converts the ledger's partition count to Sedgewick's convention, which
/// charges `m - 1` comparisons to a step on `m` elements: the one
/// pivot-vs-itself comparison per partitioning step is removed.
pub fn sedgewick_count(ledger: &ComparisonLedger) -> Result<u64, Error> {
    if ledger.steps > ledger.partition_cmps {
        return Err(Error::InconsistentLedger);
    }
    Ok(ledger.partition_cmps - ledger.steps)
}
