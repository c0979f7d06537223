//! The stochastic pivot law of median-of-k sampling on a discrete universe.
//!
//! The median of `k = 2t + 1` iid uniform variates is Beta(t+1, t+1)
//! distributed; pushing that through the inverse CDF of the universe
//! distribution gives the law of the pivot (equivalently: of the root of a
//! saturated fringe-balanced tree).

use alloc::vec::Vec;

use crate::analysis::entropy_ln;
use crate::model::{Error, SampleParams, UniverseDistribution, Value};

/// One row of Pascal's triangle, `C(n, 0) ..= C(n, n)`, computed exactly in
/// 128-bit integers and converted to doubles. Supports `n <= 127`, far
/// beyond the sample sizes used anywhere here (`k <= 99`).
pub fn binomial_coefficients(n: u32) -> Vec<f64> {
    assert!(
        n <= 127,
        "binomial row {n} would overflow the exact computation"
    );
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c: u128 = 1;
    row.push(1.0);
    for j in 0..n {
        c = c * u128::from(n - j) / u128::from(j + 1);
        row.push(c as f64);
    }
    row
}

/// CDF of the median of `k = 2t + 1` iid uniform variates (a Beta(t+1, t+1)
/// variable), as the exact binomial-tail polynomial
/// `sum_{j=t+1}^{2t+1} C(2t+1, j) x^j (1-x)^{2t+1-j}`:
/// the probability that at least `t + 1` of the `k` variates land below `x`.
pub fn beta_median_cdf(x: f64, t: u32) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
    let x = x.clamp(0.0, 1.0);
    let k = 2 * t + 1;
    // The dynamic program evaluates this in an O(u^3) loop, so the common
    // small-k case computes its coefficient row on the stack.
    let mut stack = [0.0f64; 32];
    let heap;
    let row: &[f64] = if (k as usize) < stack.len() {
        let mut c: u128 = 1;
        stack[0] = 1.0;
        for j in 0..k {
            c = c * u128::from(k - j) / u128::from(j + 1);
            stack[(j + 1) as usize] = c as f64;
        }
        &stack[..=k as usize]
    } else {
        heap = binomial_coefficients(k);
        &heap
    };
    let mut sum = 0.0;
    // Horner-free direct evaluation; k is tiny so powers stay exact enough.
    for j in (t + 1)..=k {
        sum += row[j as usize] * powu(x, j) * powu(1.0 - x, k - j);
    }
    sum.clamp(0.0, 1.0)
}

/// Small integer power by squaring; exponents here never exceed `k`.
#[inline]
fn powu(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// The pivot law: `P(pivot = v) = I(F(v)) - I(F(v-1))` where `I` is the
/// beta-median CDF and `F` the cumulative of `q`. Sums to 1.
pub fn pivot_pmf(q: &UniverseDistribution, params: SampleParams) -> Vec<f64> {
    let t = params.t();
    let mut pmf = Vec::with_capacity(q.universe_size() as usize);
    let mut below = 0.0;
    for v in 1..=q.universe_size() {
        let above = beta_median_cdf(q.cdf(v), t);
        pmf.push(above - below);
        below = above;
    }
    pmf
}

/// The split induced by conditioning on pivot value `v`: the probability
/// mass strictly below (`low`), exactly at (`hit`), and strictly above
/// (`high`) the pivot, plus the renormalized sub-distributions of the two
/// strict sides (empty at the boundary).
#[derive(Debug, Clone)]
pub struct PivotSplit {
    pub v: Value,
    pub low: f64,
    pub hit: f64,
    pub high: f64,
    pub below: Option<UniverseDistribution>,
    pub above: Option<UniverseDistribution>,
}

impl PivotSplit {
    pub fn at(q: &UniverseDistribution, v: Value) -> Result<Self, Error> {
        let u = q.universe_size();
        if v == 0 || v > u {
            return Err(Error::ValueOutOfRange {
                value: v,
                universe: u,
            });
        }
        let low = q.cdf(v - 1);
        let hit = q.weight(v);
        let high = 1.0 - q.cdf(v);
        let below = if v > 1 {
            Some(UniverseDistribution::from_weights(
                &q.weights()[..(v - 1) as usize],
            )?)
        } else {
            None
        };
        let above = if v < u {
            Some(UniverseDistribution::from_weights(
                &q.weights()[v as usize..],
            )?)
        } else {
            None
        };
        Ok(PivotSplit {
            v,
            low,
            hit,
            high,
            below,
            above,
        })
    }
}

/// Residual of the entropy aggregation identity at pivot `v`:
/// `H(q) - [H(low, hit, high) + low * H(below) + high * H(above)]`,
/// which is zero for every distribution and pivot (up to rounding).
pub fn entropy_aggregation_residual(q: &UniverseDistribution, v: Value) -> Result<f64, Error> {
    let split = PivotSplit::at(q, v)?;
    let mut aggregated = entropy_ln(&[split.low, split.hit, split.high]);
    if let Some(below) = &split.below {
        aggregated += split.low * entropy_ln(below.weights());
    }
    if let Some(above) = &split.above {
        aggregated += split.high * entropy_ln(above.weights());
    }
    Ok(entropy_ln(q.weights()) - aggregated)
}
