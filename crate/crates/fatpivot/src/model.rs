//! Shared value types: universe distributions, profiles, input sequences,
//! sample parameters, and the ternary-comparison ledger.
//!
//! Keys are integers from an ordered universe `1..=u`. All types here are
//! plain values: once constructed they are never mutated (the ledger is the
//! one write-heavy type, and each computation owns its own ledger).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// A key drawn from the universe `1..=u`.
pub type Value = u32;

/// Original position of an element in the input, `1..=n`.
///
/// Ids make stability observable and let comparison events be traced back
/// to individual elements even when many keys are equal.
pub type ElementId = u32;

/// Everything that can go wrong when constructing or combining model values.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input that must be non-empty was empty.
    EmptyInput,
    /// A raw weight was zero, negative, NaN, or infinite.
    NonPositiveWeight { index: usize },
    /// Normalization produced a weight indistinguishable from 0 or 1.
    DegenerateWeight { index: usize },
    /// A sequence value lies outside the declared universe.
    ValueOutOfRange { value: Value, universe: u32 },
    /// A profile with total 0 cannot be arranged.
    ZeroTotalProfile,
    /// Sample sizes must be odd (`k = 2t + 1`).
    EvenSampleSize { k: u32 },
    /// A scalar parameter violated its documented range.
    ParameterOutOfRange { name: &'static str },
    /// Saturation was not reached within the insertion budget.
    SaturationBudget { budget: u64 },
    /// An operation that requires a saturated tree saw an unsaturated one.
    UnsaturatedTree,
    /// Exhaustive enumeration was asked for an instance beyond its budget.
    EnumerationBudget { total: u64, universe: u32 },
    /// A ledger reported fewer partition comparisons than partitioning steps.
    InconsistentLedger,
    /// A profile entry that must be positive was zero.
    ZeroMultiplicity { value: Value },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "input must be non-empty"),
            Error::NonPositiveWeight { index } => {
                write!(f, "weight at index {index} is not a positive finite number")
            }
            Error::DegenerateWeight { index } => {
                write!(
                    f,
                    "normalized weight at index {index} underflowed to 0 or 1"
                )
            }
            Error::ValueOutOfRange { value, universe } => {
                write!(f, "value {value} outside universe 1..={universe}")
            }
            Error::ZeroTotalProfile => write!(f, "profile has total 0"),
            Error::EvenSampleSize { k } => write!(f, "sample size k={k} must be odd"),
            Error::ParameterOutOfRange { name } => {
                write!(f, "parameter `{name}` outside its valid range")
            }
            Error::SaturationBudget { budget } => {
                write!(f, "tree not saturated within {budget} insertions")
            }
            Error::UnsaturatedTree => write!(f, "operation requires a saturated tree"),
            Error::EnumerationBudget { total, universe } => {
                write!(
                    f,
                    "instance n={total}, u={universe} exceeds the enumeration budget"
                )
            }
            Error::InconsistentLedger => {
                write!(
                    f,
                    "ledger has more partitioning steps than partition comparisons"
                )
            }
            Error::ZeroMultiplicity { value } => {
                write!(f, "profile entry for value {value} must be positive")
            }
        }
    }
}

impl core::error::Error for Error {}

/// One input element: a key plus its original position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub value: Value,
    pub id: ElementId,
}

/// A concrete input: a sequence of keys tagged with their original positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSequence {
    items: Vec<Item>,
}

impl InputSequence {
    /// Builds a sequence from bare values, assigning ids `1..=n` in order.
    pub fn from_values<I: IntoIterator<Item = Value>>(values: I) -> Self {
        let items = values
            .into_iter()
            .enumerate()
            .map(|(i, value)| Item {
                value,
                id: (i + 1) as ElementId,
            })
            .collect();
        InputSequence { items }
    }

    pub fn from_items(items: Vec<Item>) -> Self {
        InputSequence { items }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        self.items.iter().map(|it| it.value)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Checks that every value lies in `1..=u`.
    pub fn validate_universe(&self, u: u32) -> Result<(), Error> {
        for it in &self.items {
            if it.value == 0 || it.value > u {
                return Err(Error::ValueOutOfRange {
                    value: it.value,
                    universe: u,
                });
            }
        }
        Ok(())
    }
}

/// A probability vector `q` over the universe `1..=u`, with its cumulative
/// sums precomputed once for inverse-CDF sampling and pivot laws.
///
/// Invariants enforced at construction: every weight is strictly positive
/// (and strictly below 1 whenever `u >= 2`), and the weights sum to 1 after
/// normalization. The final cumulative entry is pinned to exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UniverseDistribution {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl UniverseDistribution {
    /// Normalizes raw positive weights into a distribution.
    pub fn from_weights(raw: &[f64]) -> Result<Self, Error> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, &w) in raw.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { index });
            }
        }
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|&w| w / total).collect();
        for (index, &q) in weights.iter().enumerate() {
            if q <= 0.0 || (weights.len() >= 2 && q >= 1.0) {
                return Err(Error::DegenerateWeight { index });
            }
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &q in &weights {
            acc += q;
            cumulative.push(acc);
        }
        // Pin the last cumulative to 1 so sampling and pivot laws telescope exactly.
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(UniverseDistribution {
            weights,
            cumulative,
        })
    }

    /// The uniform distribution on `1..=u`.
    pub fn uniform(u: u32) -> Self {
        let w = vec![1.0; u as usize];
        Self::from_weights(&w).expect("uniform weights are valid")
    }

    /// The two-point distribution `(p, 1 - p)`.
    pub fn two(p: f64) -> Result<Self, Error> {
        if !(p.is_finite() && p > 0.0 && p < 1.0) {
            return Err(Error::ParameterOutOfRange { name: "p" });
        }
        Self::from_weights(&[p, 1.0 - p])
    }

    pub fn universe_size(&self) -> u32 {
        self.weights.len() as u32
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `q_v` for `v` in `1..=u`.
    pub fn weight(&self, v: Value) -> f64 {
        self.weights[(v - 1) as usize]
    }

    /// Cumulative `F(v) = q_1 + ... + q_v`, with `F(0) = 0` and `F(u) = 1`.
    pub fn cdf(&self, v: u32) -> f64 {
        if v == 0 {
            0.0
        } else {
            self.cumulative[(v - 1) as usize]
        }
    }

    pub(crate) fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// The smallest weight `min_v q_v`.
    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Multiplicity vector of a multiset over `1..=u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    counts: Vec<u64>,
}

impl Profile {
    pub fn new(counts: Vec<u64>) -> Self {
        Profile { counts }
    }

    /// Counts the occurrences of each value of `1..=u` in a sequence.
    pub fn of_sequence(seq: &InputSequence, u: u32) -> Result<Self, Error> {
        seq.validate_universe(u)?;
        let mut counts = vec![0u64; u as usize];
        for it in seq.items() {
            counts[(it.value - 1) as usize] += 1;
        }
        Ok(Profile { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn universe_size(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The count of value `v` (1-based).
    pub fn count(&self, v: Value) -> u64 {
        self.counts[(v - 1) as usize]
    }
}

/// Pivot-sampling parameters: the sample size `k = 2t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleParams {
    k: u32,
    t: u32,
}

impl SampleParams {
    pub fn with_k(k: u32) -> Result<Self, Error> {
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::EvenSampleSize { k });
        }
        Ok(SampleParams { k, t: (k - 1) / 2 })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn t(self) -> u32 {
        self.t
    }

    /// The explicit median-selection cost constant: insertion-sort selection
    /// uses at most `k(k-1)/2 = median_cost_factor() * k` ternary comparisons.
    pub fn median_cost_factor(self) -> f64 {
        f64::from(self.k - 1) / 2.0
    }
}

/// One logged ternary comparison of an element against a pivot value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CmpEvent {
    pub id: ElementId,
    pub pivot: Value,
    pub outcome: Ordering,
}

/// Categorized ternary-comparison counts plus an optional event log.
///
/// Partition comparisons are the element-vs-pivot comparisons of
/// partitioning steps (and of leaf splits and descents in fringe-balanced
/// trees); exactly one event is recorded per partition comparison when
/// logging is enabled. Median-selection and insertion-sort comparisons are
/// counted separately and never logged as events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonLedger {
    pub partition_cmps: u64,
    pub median_cmps: u64,
    pub insertionsort_cmps: u64,
    /// Number of partitioning steps (equivalently: leaf splits).
    pub steps: u64,
    events: Option<Vec<CmpEvent>>,
}

impl ComparisonLedger {
    /// A ledger that records every partition comparison as an event.
    pub fn new() -> Self {
        ComparisonLedger {
            partition_cmps: 0,
            median_cmps: 0,
            insertionsort_cmps: 0,
            steps: 0,
            events: Some(Vec::new()),
        }
    }

    /// A ledger that only counts. Used for large simulations where the
    /// event log (one record per comparison) would dominate memory.
    pub fn counting_only() -> Self {
        ComparisonLedger {
            events: None,
            ..ComparisonLedger::new()
        }
    }

    #[inline]
    pub fn record_partition(&mut self, id: ElementId, pivot: Value, outcome: Ordering) {
        self.partition_cmps += 1;
        if let Some(events) = &mut self.events {
            events.push(CmpEvent { id, pivot, outcome });
        }
    }

    /// The event log, if this ledger records one.
    pub fn events(&self) -> Option<&[CmpEvent]> {
        self.events.as_deref()
    }

    /// The event log as a canonical (sorted) multiset for comparisons.
    pub fn event_multiset(&self) -> Option<Vec<CmpEvent>> {
        self.events.as_ref().map(|ev| {
            let mut sorted = ev.clone();
            sorted.sort_unstable();
            sorted
        })
    }

    pub fn total_cmps(&self) -> u64 {
        self.partition_cmps + self.median_cmps + self.insertionsort_cmps
    }
}

impl Default for ComparisonLedger {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_symmetric_and_exact() {
        let d = UniverseDistribution::from_weights(&[1.0, 1.0]).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);
        let d = UniverseDistribution::from_weights(&[2.0, 1.0, 1.0]).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.25, 0.25]);
        let d = UniverseDistribution::from_weights(&[3.0]).unwrap();
        assert_eq!(d.weights(), &[1.0]);
    }

    #[test]
    fn normalize_is_idempotent() {
        let raw = [0.3, 1.7, 2.2, 0.9, 4.1];
        let once = UniverseDistribution::from_weights(&raw).unwrap();
        let twice = UniverseDistribution::from_weights(once.weights()).unwrap();
        for (a, b) in once.weights().iter().zip(twice.weights()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_bad_weights() {
        assert_eq!(
            UniverseDistribution::from_weights(&[]),
            Err(Error::EmptyInput)
        );
        assert!(matches!(
            UniverseDistribution::from_weights(&[1.0, 0.0]),
            Err(Error::NonPositiveWeight { index: 1 })
        ));
        assert!(matches!(
            UniverseDistribution::from_weights(&[1.0, -2.0]),
            Err(Error::NonPositiveWeight { index: 1 })
        ));
    }

    #[test]
    fn distribution_invariants() {
        let d = UniverseDistribution::from_weights(&[3.0, 2.0, 5.0]).unwrap();
        let sum: f64 = d.weights().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        assert_eq!(d.cdf(0), 0.0);
        assert_eq!(d.cdf(3), 1.0);
        assert!((d.min_weight() - 0.2).abs() <= 1e-15);
    }

    #[test]
    fn profile_counts_values() {
        let seq = InputSequence::from_values([1, 2, 1]);
        let p = Profile::of_sequence(&seq, 2).unwrap();
        assert_eq!(p.counts(), &[2, 1]);
        assert_eq!(p.total(), 3);

        let empty = InputSequence::from_values([]);
        let p = Profile::of_sequence(&empty, 3).unwrap();
        assert_eq!(p.counts(), &[0, 0, 0]);

        let seq = InputSequence::from_values([3, 3, 3]);
        let p = Profile::of_sequence(&seq, 3).unwrap();
        assert_eq!(p.counts(), &[0, 0, 3]);

        let seq = InputSequence::from_values([4]);
        assert!(matches!(
            Profile::of_sequence(&seq, 3),
            Err(Error::ValueOutOfRange {
                value: 4,
                universe: 3
            })
        ));
    }

    #[test]
    fn sample_params_require_odd_k() {
        assert!(SampleParams::with_k(0).is_err());
        assert!(SampleParams::with_k(4).is_err());
        let p = SampleParams::with_k(7).unwrap();
        assert_eq!(p.k(), 2 * p.t() + 1);
        assert_eq!(p.median_cost_factor(), 3.0);
    }

    #[test]
    fn ledger_counts_and_events_agree() {
        let mut ledger = ComparisonLedger::new();
        ledger.record_partition(1, 5, Ordering::Less);
        ledger.record_partition(2, 5, Ordering::Equal);
        assert_eq!(ledger.partition_cmps, 2);
        assert_eq!(ledger.events().unwrap().len(), 2);

        let mut counting = ComparisonLedger::counting_only();
        counting.record_partition(1, 5, Ordering::Greater);
        assert_eq!(counting.partition_cmps, 1);
        assert!(counting.events().is_none());
    }
}
