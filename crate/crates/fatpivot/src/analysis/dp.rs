//! Exact expected search cost of saturated k-fringe-balanced trees by
//! dynamic programming over contiguous subuniverses.
//!
//! Conditioning the recursive cost description on the root's value leaves
//! subproblems that are always renormalized contiguous slices of the
//! original distribution, so ranges `(i, j)` index the whole state space:
//! `O(u^2)` states, `O(u^3)` time.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::pivot::beta_median_cdf;
use crate::analysis::{qs_entropy, qs_entropy_profile};
use crate::model::{Error, Profile, SampleParams, UniverseDistribution};

/// Expected search cost `E[A_q]` in a saturated k-fringe-balanced tree
/// grown from iid draws of `q`: the mean depth (both path endpoints
/// counted) of the node holding a `q`-distributed value.
///
/// Recurrence over ranges: an empty range costs 0; otherwise one
/// comparison at the root plus the renormalized costs of the two strict
/// sides, weighted by the probability of descending into them, averaged
/// over the root's law (the beta-median CDF of the range-local cumulative).
///
/// ```
/// use fatpivot::analysis::expected_search_cost_dp;
/// use fatpivot::{SampleParams, UniverseDistribution};
///
/// let q = UniverseDistribution::uniform(2);
/// for k in [1, 3, 5] {
///     let cost = expected_search_cost_dp(&q, SampleParams::with_k(k).unwrap());
///     // Either value roots the tree; the other sits at depth 2.
///     assert!((cost - 1.5).abs() < 1e-12);
/// }
/// ```
pub fn expected_search_cost_dp(q: &UniverseDistribution, params: SampleParams) -> f64 {
    let u = q.universe_size() as usize;
    let t = params.t();
    // cum[v] = F(v), cum[0] = 0.
    let mut cum = Vec::with_capacity(u + 1);
    cum.push(0.0);
    cum.extend((1..=u).map(|v| q.cdf(v as u32)));

    // cost[idx(i, j)] = expected search cost of the saturated subtree over
    // values i..=j (1-based), filled by increasing range length.
    let idx = |i: usize, j: usize| (i - 1) * u + (j - 1);
    let mut cost = vec![0.0f64; u * u];
    for len in 1..=u {
        for i in 1..=(u - len + 1) {
            let j = i + len - 1;
            let mass = cum[j] - cum[i - 1];
            let mut expect = 1.0;
            let mut cdf_below = 0.0;
            for v in i..=j {
                // Range-local cumulative just below and at v.
                let s_above = if v == j {
                    1.0
                } else {
                    (cum[v] - cum[i - 1]) / mass
                };
                let pick = beta_median_cdf(s_above, t) - beta_median_cdf(cdf_below, t);
                let mut tail = 0.0;
                if v > i {
                    tail += cdf_below * cost[idx(i, v - 1)];
                }
                if v < j {
                    tail += (1.0 - s_above) * cost[idx(v + 1, j)];
                }
                expect += pick * tail;
                cdf_below = s_above;
            }
            cost[idx(i, j)] = expect;
        }
    }
    cost[idx(1, u)]
}

/// The exact expected search cost for unsampled trees (`k = 1`):
/// `2 Q(q) + 1`, the classical move-to-root / saturated-BST average.
pub fn allen_munro_cost(q: &UniverseDistribution) -> f64 {
    2.0 * qs_entropy(q.weights()) + 1.0
}

/// Sedgewick's exact average for fat-pivot quicksort without sampling on a
/// random arrangement of the multiset with profile `x`:
/// `2 Q(x) + n - u` ternary comparisons (in his counting convention).
///
/// Requires every multiplicity to be positive (a zero entry would shrink
/// the universe and silently change `u`).
pub fn sedgewick_exact_multiset(x: &Profile) -> Result<f64, Error> {
    for (i, &c) in x.counts().iter().enumerate() {
        if c == 0 {
            return Err(Error::ZeroMultiplicity {
                value: (i + 1) as u32,
            });
        }
    }
    let n = x.total() as f64;
    let u = f64::from(x.universe_size());
    Ok(2.0 * qs_entropy_profile(x.counts()) + n - u)
}
