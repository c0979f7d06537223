//! Instrumented fat-pivot (three-way) median-of-k quicksort, k-fringe-
//! balanced search trees, and the analytic machinery to predict and bound
//! their ternary-comparison costs on inputs with equal keys.
//!
//! Keys are integers from an ordered universe `1..=u`. Inputs come from two
//! models: uniformly random arrangements of a fixed multiset (given by its
//! profile of multiplicities), and iid draws from a universe distribution
//! `q`. Sorting costs are measured in ternary comparisons, split into
//! partition, median-selection, and insertion-sort categories.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes
//! through `libm`, so analytic values are bit-reproducible across
//! platforms. IO, file formats, experiment harnesses, and the command-line
//! interface live in the companion crate `fatpivot-lab`.
//!
//! Module map:
//!
//! * [`model`] — shared value types and the comparison ledger.
//! * [`inputgen`] — seeded deterministic generators for both input models
//!   and the profile-degeneracy predicate.
//! * [`quicksort`] — the reference sorting algorithm with recursion-tree
//!   capture.
//! * [`fringe`] — k-fringe-balanced trees: insert, search, saturation,
//!   node depths.
//! * [`analysis`] — entropies, the stochastic pivot law, the exact
//!   dynamic program for saturated-tree search costs, cost bounds, and
//!   brute-force oracles.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod fringe;
pub mod inputgen;
pub mod model;
pub mod quicksort;

pub use fringe::{build_until_saturated, FringeTree, NodeDepthVector, Search, SearchOutcome, Tree};
pub use inputgen::{
    is_profile_degenerate, sample_iid, shuffle_multiset, DegeneracyParams, Rng, Seed,
};
pub use model::{
    CmpEvent, ComparisonLedger, ElementId, Error, InputSequence, Item, Profile, SampleParams,
    UniverseDistribution, Value,
};
pub use quicksort::{quicksort_k, quicksort_k_with, sedgewick_count, select_median, SortOutcome};
