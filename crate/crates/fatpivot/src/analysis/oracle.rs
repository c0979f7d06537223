//! Brute-force enumeration oracles with exact rational arithmetic.
//!
//! These are the independent ground truth for the average-case identities:
//! they run the actual instrumented sort over *every* arrangement of a
//! small multiset (or every value sequence of a small iid instance) and
//! average the observed comparison counts, with no shared code path to the
//! closed forms they are compared against.

use alloc::vec::Vec;
use core::fmt;

use crate::model::{ComparisonLedger, Error, InputSequence, Profile, SampleParams, Value};
use crate::quicksort::quicksort_k_with;

/// Enumeration budget: instances beyond this are refused rather than
/// silently slow (`u^n` resp. multinomial growth).
const MAX_TOTAL: u64 = 9;
const MAX_UNIVERSE: u32 = 4;

/// An exact rational with 128-bit terms, always kept reduced with a
/// positive denominator. Large enough for every sum this oracle can see
/// (counts are at most ~100 over at most 9! arrangements).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        Rational::integer(0)
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn denominator(self) -> i128 {
        self.den
    }

    pub fn mul_int(self, f: i128) -> Rational {
        Rational::new(self.num * f, self.den)
    }

    pub fn div_int(self, d: i128) -> Rational {
        Rational::new(self.num, self.den * d)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl core::ops::Add for Rational {
    type Output = Rational;

    fn add(self, other: Rational) -> Rational {
        Rational::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Quicksort entropy of a profile as an exact rational:
/// `Q(x) = sum_{i<j} x_i x_j / (x_i + ... + x_j)`.
pub fn qs_entropy_rational(counts: &[u64]) -> Rational {
    let u = counts.len();
    let mut q = Rational::zero();
    for i in 0..u {
        let mut span = counts[i] as i128;
        for j in (i + 1)..u {
            span += counts[j] as i128;
            q = q + Rational::new(counts[i] as i128 * counts[j] as i128, span);
        }
    }
    q
}

/// `2 Q(x) + n - u` as an exact rational (every multiplicity positive).
pub fn sedgewick_exact_rational(x: &Profile) -> Result<Rational, Error> {
    for (i, &c) in x.counts().iter().enumerate() {
        if c == 0 {
            return Err(Error::ZeroMultiplicity {
                value: (i + 1) as u32,
            });
        }
    }
    let n = x.total() as i128;
    let u = i128::from(x.universe_size());
    Ok(qs_entropy_rational(x.counts()).mul_int(2) + Rational::integer(n - u))
}

/// Which counting convention to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountConvention {
    /// Every partitioning step on `m` elements costs `m` comparisons
    /// (the pivot element is compared against itself).
    Algorithm1,
    /// Sedgewick's convention: `m - 1` per step.
    Sedgewick,
}

fn convention_count(ledger: &ComparisonLedger, conv: CountConvention) -> u64 {
    match conv {
        CountConvention::Algorithm1 => ledger.partition_cmps,
        CountConvention::Sedgewick => ledger.partition_cmps - ledger.steps,
    }
}

/// Visits every distinct arrangement of the multiset with profile `x`
/// exactly once, in lexicographic order of value sequences.
pub fn for_each_arrangement<F: FnMut(&InputSequence)>(x: &Profile, mut f: F) {
    let mut remaining: Vec<u64> = x.counts().to_vec();
    let total = x.total() as usize;
    let mut prefix: Vec<Value> = Vec::with_capacity(total);
    fn rec<F: FnMut(&InputSequence)>(
        remaining: &mut [u64],
        prefix: &mut Vec<Value>,
        total: usize,
        f: &mut F,
    ) {
        if prefix.len() == total {
            f(&InputSequence::from_values(prefix.iter().copied()));
            return;
        }
        for v in 0..remaining.len() {
            if remaining[v] > 0 {
                remaining[v] -= 1;
                prefix.push((v + 1) as Value);
                rec(remaining, prefix, total, f);
                prefix.pop();
                remaining[v] += 1;
            }
        }
    }
    rec(&mut remaining, &mut prefix, total, &mut f);
}

/// Exact expected comparison count of median-of-k quicksort on a uniformly
/// random arrangement of the multiset with profile `x`, by running the
/// sort on every distinct arrangement.
pub fn brute_force_multiset(
    x: &Profile,
    params: SampleParams,
    conv: CountConvention,
) -> Result<Rational, Error> {
    let total = x.total();
    if total == 0 {
        return Err(Error::ZeroTotalProfile);
    }
    if total > MAX_TOTAL || x.universe_size() > MAX_UNIVERSE {
        return Err(Error::EnumerationBudget {
            total,
            universe: x.universe_size(),
        });
    }
    let mut sum: u64 = 0;
    let mut arrangements: u64 = 0;
    for_each_arrangement(x, |seq| {
        let mut ledger = ComparisonLedger::counting_only();
        quicksort_k_with(seq, params, &mut ledger);
        sum += convention_count(&ledger, conv);
        arrangements += 1;
    });
    Ok(Rational::new(sum as i128, arrangements as i128))
}

/// Exact expected comparison count of median-of-k quicksort on `n` iid
/// draws from `q`, by enumerating all `u^n` value sequences weighted by
/// their product probabilities.
pub fn brute_force_iid(
    q: &crate::model::UniverseDistribution,
    n: u32,
    params: SampleParams,
    conv: CountConvention,
) -> Result<f64, Error> {
    let u = q.universe_size();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if u64::from(n) > MAX_TOTAL || u > MAX_UNIVERSE {
        return Err(Error::EnumerationBudget {
            total: u64::from(n),
            universe: u,
        });
    }
    let mut values: Vec<Value> = alloc::vec![1; n as usize];
    let mut expectation = 0.0;
    loop {
        let mut prob = 1.0;
        for &v in &values {
            prob *= q.weight(v);
        }
        let seq = InputSequence::from_values(values.iter().copied());
        let mut ledger = ComparisonLedger::counting_only();
        quicksort_k_with(&seq, params, &mut ledger);
        expectation += prob * convention_count(&ledger, conv) as f64;

        // Odometer increment over the u^n grid.
        let mut pos = values.len();
        loop {
            if pos == 0 {
                return Ok(expectation);
            }
            pos -= 1;
            if values[pos] < u {
                values[pos] += 1;
                break;
            }
            values[pos] = 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UniverseDistribution;

    fn params(k: u32) -> SampleParams {
        SampleParams::with_k(k).unwrap()
    }

    #[test]
    fn rational_arithmetic_reduces() {
        let r = Rational::new(4, -6);
        assert_eq!((r.numerator(), r.denominator()), (-2, 3));
        let s = Rational::new(1, 2) + Rational::new(1, 3);
        assert_eq!(s, Rational::new(5, 6));
        assert_eq!(Rational::new(7, 3).to_f64(), 7.0 / 3.0);
        assert_eq!(alloc::format!("{}", Rational::new(6, 3)), "2");
        assert_eq!(alloc::format!("{}", Rational::new(7, 3)), "7/3");
    }

    #[test]
    fn arrangement_enumeration_counts() {
        let mut count = 0;
        for_each_arrangement(&Profile::new(alloc::vec![2, 1]), |_| count += 1);
        assert_eq!(count, 3);
        let mut count = 0;
        for_each_arrangement(&Profile::new(alloc::vec![1, 1, 1]), |_| count += 1);
        assert_eq!(count, 6);
        let mut count = 0;
        for_each_arrangement(&Profile::new(alloc::vec![3]), |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn multiset_oracle_reference_values() {
        let x = Profile::new(alloc::vec![2, 1]);
        let sedgewick = brute_force_multiset(&x, params(1), CountConvention::Sedgewick).unwrap();
        assert_eq!(sedgewick, Rational::new(7, 3));
        let alg1 = brute_force_multiset(&x, params(1), CountConvention::Algorithm1).unwrap();
        assert_eq!(alg1, Rational::new(13, 3));

        let x = Profile::new(alloc::vec![1, 1]);
        let sedgewick = brute_force_multiset(&x, params(1), CountConvention::Sedgewick).unwrap();
        assert_eq!(sedgewick, Rational::integer(1));
    }

    #[test]
    fn oracle_agrees_with_closed_form_on_small_profiles() {
        for counts in [
            alloc::vec![1u64, 1, 1],
            alloc::vec![3, 2],
            alloc::vec![2, 2, 1],
        ] {
            let x = Profile::new(counts);
            let oracle = brute_force_multiset(&x, params(1), CountConvention::Sedgewick).unwrap();
            let closed = sedgewick_exact_rational(&x).unwrap();
            assert_eq!(oracle, closed, "profile {:?}", x.counts());
        }
    }

    #[test]
    fn iid_oracle_reference_value() {
        let q = UniverseDistribution::uniform(2);
        let got = brute_force_iid(&q, 2, params(1), CountConvention::Algorithm1).unwrap();
        assert!((got - 2.5).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let x = Profile::new(alloc::vec![5, 5]);
        assert!(matches!(
            brute_force_multiset(&x, params(1), CountConvention::Sedgewick),
            Err(Error::EnumerationBudget { .. })
        ));
        let q = UniverseDistribution::uniform(5);
        assert!(brute_force_iid(&q, 2, params(1), CountConvention::Algorithm1).is_err());
    }
}
