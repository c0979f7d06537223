//! Closed-form constants, entropies, the exact search-cost dynamic
//! program, non-asymptotic cost bounds, and brute-force oracles.
//!
//! Everything here is a pure function of its inputs, computed in double
//! precision (the enumeration oracles in [`oracle`] use exact rational
//! arithmetic instead so that average-case identities can be checked as
//! equalities).

mod dp;
mod oracle;
mod pivot;
mod quad;

pub use dp::{allen_munro_cost, expected_search_cost_dp, sedgewick_exact_multiset};
pub use oracle::{
    brute_force_iid, brute_force_multiset, for_each_arrangement, qs_entropy_rational,
    sedgewick_exact_rational, CountConvention, Rational,
};
pub use pivot::{
    beta_median_cdf, binomial_coefficients, entropy_aggregation_residual, pivot_pmf, PivotSplit,
};
pub use quad::{adaptive_simpson, expected_beta_entropy_quadrature, hoelder_constant};

use crate::model::{Error, SampleParams, UniverseDistribution};

/// Harmonic number `H_m = 1 + 1/2 + ... + 1/m`, with `H_0 = 0`.
///
/// Summed from the smallest term up so that large `m` keep full precision.
pub fn harmonic(m: u64) -> f64 {
    let mut sum = 0.0;
    for i in (1..=m).rev() {
        sum += 1.0 / i as f64;
    }
    sum
}

/// Binary Shannon entropy `H(q) = sum_v q_v log2(1/q_v)`.
pub fn entropy_ld(weights: &[f64]) -> f64 {
    entropy_ln(weights) / core::f64::consts::LN_2
}

/// Base-e Shannon entropy `H_ln(q) = sum_v q_v ln(1/q_v)`.
///
/// Zero weights contribute nothing (`x ln(1/x) -> 0`).
pub fn entropy_ln(weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &w in weights {
        if w > 0.0 {
            sum -= w * libm::log(w);
        }
    }
    sum
}

/// Quicksort entropy `Q(w) = sum_{i<j} w_i w_j / (w_i + ... + w_j)`,
/// the exact quantity in Sedgewick's fat-pivot average `2Q(x) + n - u`.
pub fn qs_entropy(weights: &[f64]) -> f64 {
    let u = weights.len();
    let mut prefix = alloc::vec::Vec::with_capacity(u + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        prefix.push(acc);
    }
    let mut q = 0.0;
    for i in 0..u {
        for j in (i + 1)..u {
            let denom = prefix[j + 1] - prefix[i];
            if denom > 0.0 {
                q += weights[i] * weights[j] / denom;
            }
        }
    }
    q
}

/// Quicksort entropy of a profile of multiplicities.
pub fn qs_entropy_profile(counts: &[u64]) -> f64 {
    let weights: alloc::vec::Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    qs_entropy(&weights)
}

/// The constant `alpha_k = ln 2 / (H_{k+1} - H_{(k+1)/2})`: the asymptotic
/// ratio of median-of-k quicksort's comparison count to the entropy lower
/// bound. Decreases towards 1 as `k` grows.
pub fn alpha_k(k: u32) -> Result<f64, Error> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::EvenSampleSize { k });
    }
    let k = u64::from(k);
    Ok(core::f64::consts::LN_2 / (harmonic(k + 1) - harmonic(k.div_ceil(2))))
}

/// Expected base-e entropy of the spacings `(P, 1-P)` of a symmetric
/// beta-distributed split with parameter `t`: equals
/// `H_{2t+2} - H_{t+1}` in closed form.
pub fn expected_beta_entropy(t: u32) -> f64 {
    harmonic(2 * u64::from(t) + 2) - harmonic(u64::from(t) + 1)
}

/// Beta function at positive integer arguments, via factorials:
/// `B(a, b) = (a-1)! (b-1)! / (a+b-1)!`.
pub fn beta_function_int(a: u32, b: u32) -> f64 {
    let mut result = 1.0;
    // B(a, b) = prod_{i=1}^{b-1} i / (a + i) / a ... computed stably as a
    // running product to avoid overflowing factorials.
    let a = f64::from(a);
    for i in 1..b {
        result *= f64::from(i) / (a + f64::from(i));
    }
    result / a
}

/// Which side of the search-cost sandwich a set of constants bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// Constants `(c, d)` of the non-asymptotic sandwich on the expected
/// search cost of saturated k-fringe-balanced trees:
///
/// * upper: `E[A_q] <= c * H_ln(q) + d` whenever `c >= 0`,
/// * lower: `E[A_q] >= c * H_ln(q) - d` whenever `d >= 0`,
///
/// for every universe distribution `q`. Each bound comes in a family
/// parameterized by `eps`; as `eps -> 0` both `c` values converge to
/// `1 / (H_{k+1} - H_{t+1})` at the price of a growing `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub kind: BoundKind,
    pub eps: f64,
    pub c: f64,
    pub d: f64,
    /// `H_{k+1} - H_{t+1}`, the expected split entropy of the pivot law.
    pub expected_split_entropy: f64,
    /// `H_k - H_t`, the log-spacing correction term (upper bound only).
    pub spacing_log_term: Option<f64>,
    /// Whether the side condition of the respective bound holds; invalid
    /// constants must never be used in a sandwich check.
    pub valid: bool,
}

/// Computes the sandwich constants for sample parameter `k = 2t + 1`.
///
/// `eps` must lie in `(0, 1)` for the upper bound and in `(0, 1/e)` for
/// the lower bound; constants violating the bound's side condition are
/// returned with `valid == false`.
pub fn bound_constants(
    kind: BoundKind,
    params: SampleParams,
    eps: f64,
) -> Result<BoundConstants, Error> {
    let t = u64::from(params.t());
    let k = u64::from(params.k());
    let split_entropy = harmonic(k + 1) - harmonic(t + 1);
    let hit_floor = f64::from(params.t() + 1) * beta_function_int(params.t() + 1, params.t() + 1)
        / (libm::pow(eps, t as f64 + 2.0) * libm::pow(1.0 - eps, t as f64));
    match kind {
        BoundKind::Upper => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::ParameterOutOfRange { name: "eps" });
            }
            let spacing = harmonic(k) - harmonic(t);
            let denom = split_entropy - 4.0 * eps * spacing;
            let c = 1.0 / denom;
            Ok(BoundConstants {
                kind,
                eps,
                c,
                d: hit_floor,
                expected_split_entropy: split_entropy,
                spacing_log_term: Some(spacing),
                valid: denom > 0.0,
            })
        }
        BoundKind::Lower => {
            if !(eps > 0.0 && eps < 1.0 / core::f64::consts::E) {
                return Err(Error::ParameterOutOfRange { name: "eps" });
            }
            let c = 1.0 / (split_entropy + 4.0 * eps + eps * libm::log(1.0 / eps));
            let d = (c * libm::log(3.0) - 1.0) * hit_floor;
            Ok(BoundConstants {
                kind,
                eps,
                c,
                d,
                expected_split_entropy: split_entropy,
                spacing_log_term: None,
                valid: d >= 0.0,
            })
        }
    }
}

/// Information-theoretic lower bound on the expected number of ternary
/// comparisons to sort `n` iid draws from `q`:
/// `H_ld(q) * n - n / ln 2` (leading terms only; for small entropies the
/// bound is negative and therefore vacuous).
pub fn sorting_lower_bound(q: &UniverseDistribution, n: u64) -> f64 {
    entropy_ld(q.weights()) * n as f64 - n as f64 / core::f64::consts::LN_2
}

/// Two-sided Chernoff bound for a binomial proportion:
/// `P(|X/n - p| >= delta) <= 2 exp(-2 delta^2 n)`.
pub fn chernoff_binomial_bound(n: u64, delta: f64) -> f64 {
    2.0 * libm::exp(-2.0 * delta * delta * n as f64)
}

/// Chernoff-type bound for the total variation of a multinomial:
/// `P(sum_v |X_v/n - p_v| >= delta) <= 3 exp(-delta^2 n / 25)`,
/// valid for `delta >= sqrt(20 u / n)` (the caller knows `u`).
pub fn chernoff_multinomial_bound(n: u64, delta: f64) -> f64 {
    3.0 * libm::exp(-delta * delta * n as f64 / 25.0)
}

/// Bound on the entropy estimation bias of a normalized multinomial:
/// `|E[H_ln(X/n)] - H_ln(p)| <= C_h delta^h (1 - 3 e^{-delta^2 n/25})
///  + 3 u ln(u) e^{-delta^2 n/25}`.
pub fn entropy_concentration_rho(u: u32, n: u64, delta: f64, h: f64) -> Result<f64, Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterOutOfRange { name: "delta" });
    }
    if delta < libm::sqrt(20.0 * f64::from(u) / n as f64) {
        return Err(Error::ParameterOutOfRange { name: "delta" });
    }
    let c_h = hoelder_constant(h)?;
    let tail = libm::exp(-delta * delta * n as f64 / 25.0);
    let u = f64::from(u);
    Ok(c_h * libm::pow(delta, h) * (1.0 - 3.0 * tail) + 3.0 * u * libm::log(u) * tail)
}

/// Exact lower binomial tail `P(Binomial(n, p) < k)`.
///
/// Computed term by term in log space; `k` is small in every use here, so
/// this is both fast and accurate. This is the finite-n companion of the
/// asymptotic far-end tail statements used to argue that degenerate
/// profiles are vanishingly rare.
pub fn binomial_left_tail(n: u64, p: f64, k: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if k == 0 {
        return 0.0;
    }
    let ln_p = libm::log(p);
    let ln_1p = libm::log1p(-p);
    let mut sum = 0.0;
    let mut ln_binom = 0.0; // ln C(n, 0)
    for j in 0..u64::from(k) {
        if j > 0 {
            ln_binom += libm::log((n - j + 1) as f64) - libm::log(j as f64);
        }
        sum += libm::exp(ln_binom + j as f64 * ln_p + (n - j) as f64 * ln_1p);
    }
    sum.min(1.0)
}

/// Constants of the explicit logarithmic-height tail bound for trees grown
/// from random inputs: a tree of `n >= n0` elements has height `> c ln n`
/// with probability at most `2 n^eta`, where
///
/// * `p = 0.99 - 2 P(Beta(t+1, t+1) > alpha - 0.01)` lower-bounds the
///   probability of an `alpha`-balanced split,
/// * `delta = p - (1/ln(1/alpha) + 1) / c`,
/// * `eta = 1 - 2 c delta^2`.
///
/// The bound is only meaningful when `delta > 0` (and useful when
/// `eta < 0`); `valid` reflects the former. Note that for moderate `c`
/// these formulas can be strictly vacuous: at `k = 1, c = 13`, for
/// example, no admissible `alpha` pushes `eta` below zero (the grid scan
/// in [`best_height_constants`] bottoms out near `eta ≈ 0.43`), even
/// though negative exponents are sometimes quoted for such parameters
/// elsewhere. Nothing here treats tabulated `eta` values as targets; only
/// the formulas above are evaluated, and their validity is always flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightBoundConstants {
    pub k: u32,
    pub c: f64,
    pub alpha: f64,
    pub p: f64,
    pub delta: f64,
    pub eta: f64,
    pub valid: bool,
}

/// Evaluates the height-bound constants at a given balance parameter
/// `alpha` (must exceed 0.51 so that `alpha - 0.01 > 1/2`).
pub fn height_constants(
    params: SampleParams,
    c: f64,
    alpha: f64,
) -> Result<HeightBoundConstants, Error> {
    if !(alpha > 0.51 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange { name: "alpha" });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "c" });
    }
    let upper_tail = 1.0 - beta_median_cdf(alpha - 0.01, params.t());
    let p = 0.99 - 2.0 * upper_tail;
    let delta = p - (1.0 / libm::log(1.0 / alpha) + 1.0) / c;
    let eta = 1.0 - 2.0 * c * delta * delta;
    Ok(HeightBoundConstants {
        k: params.k(),
        c,
        alpha,
        p,
        delta,
        eta,
        valid: delta > 0.0,
    })
}

/// Scans a grid of balance parameters and returns the valid constants with
/// the smallest `eta` (strongest bound), if any choice is valid.
pub fn best_height_constants(params: SampleParams, c: f64) -> Option<HeightBoundConstants> {
    let mut best: Option<HeightBoundConstants> = None;
    let mut alpha = 0.515;
    while alpha < 0.999 {
        if let Ok(hc) = height_constants(params, c, alpha) {
            if hc.valid && best.is_none_or(|b| hc.eta < b.eta) {
                best = Some(hc);
            }
        }
        alpha += 0.005;
    }
    best
}
