//! Seeded, deterministic input generators for both input models, plus the
//! profile-degeneracy predicate.
//!
//! # Random number generation
//!
//! All randomness comes from **counter-mode SplitMix64**, fixed here once
//! and for all so that every simulation number in this project is
//! reproducible bit-exactly on every platform:
//!
//! * `mix64` is the SplitMix64 finalizer
//!   (`z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!    z *= 0x94D049BB133111EB; z ^= z >> 31`).
//! * A generator has a 64-bit `stream` key and a 64-bit `counter`; output
//!   `i` is `mix64(stream + i * GOLDEN_GAMMA)` where `GOLDEN_GAMMA =
//!   0x9E3779B97F4A7C15` (all arithmetic wrapping).
//! * `Rng::new(seed)` uses `stream = mix64(seed)`.
//! * Trial `i` of a multi-trial experiment uses
//!   `stream = mix64(mix64(seed) ^ (i + 1) * GOLDEN_GAMMA)`, so trials are
//!   independent of execution order and may run concurrently.
//!
//! Uniform doubles take the top 53 bits (`next_u64() >> 11` scaled by
//! `2^-53`), giving values in `[0, 1)`. Bounded integers use Lemire's
//! multiply-and-reject method, which is unbiased.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Error, InputSequence, Item, Profile, UniverseDistribution, Value};

/// Golden-ratio increment used by SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a fixed-point-free 64-bit mixing permutation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// A 64-bit seed. Identical seeds produce bit-identical sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// Counter-mode SplitMix64 generator (see module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rng {
    stream: u64,
    counter: u64,
}

impl Rng {
    pub fn new(seed: Seed) -> Self {
        Rng {
            stream: mix64(seed.0),
            counter: 0,
        }
    }

    /// The generator for trial `trial_index` of an experiment seeded with
    /// `seed`. Trials are mutually independent streams.
    pub fn for_trial(seed: Seed, trial_index: u64) -> Self {
        let stream =
            mix64(mix64(seed.0) ^ (trial_index.wrapping_add(1)).wrapping_mul(GOLDEN_GAMMA));
        Rng { stream, counter: 0 }
    }

    /// The stream key; identifies this generator's output sequence.
    pub fn stream_key(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.stream
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / ((1u64 << 53) as f64))
    }

    /// Uniform in `0..bound` (Lemire's unbiased multiply-reject method).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

/// Draws one value from `q` by inverse CDF: the smallest `v` with
/// `F(v) >= x`. Ties at cumulative boundaries resolve to the lower value.
#[inline]
pub(crate) fn inverse_cdf(q: &UniverseDistribution, x: f64) -> Value {
    let cum = q.cumulative();
    let idx = cum.partition_point(|&c| c < x);
    (idx.min(cum.len() - 1) + 1) as Value
}

/// An endless stream of iid draws from `q`, tagging each draw with the next
/// id `1, 2, ...`.
#[derive(Debug, Clone)]
pub struct IidStream {
    dist: UniverseDistribution,
    rng: Rng,
    next_id: u32,
}

impl IidStream {
    pub fn new(dist: UniverseDistribution, rng: Rng) -> Self {
        IidStream {
            dist,
            rng,
            next_id: 1,
        }
    }

    pub fn next_item(&mut self) -> Item {
        let value = inverse_cdf(&self.dist, self.rng.next_f64());
        let id = self.next_id;
        self.next_id += 1;
        Item { value, id }
    }
}

/// Samples `n` iid values from `q`; ids are `1..=n` in draw order.
pub fn sample_iid(q: &UniverseDistribution, n: u64, seed: Seed) -> InputSequence {
    let mut stream = IidStream::new(q.clone(), Rng::new(seed));
    let items = (0..n).map(|_| stream.next_item()).collect();
    InputSequence::from_items(items)
}

/// A uniformly random arrangement of the multiset with profile `x`.
///
/// The multiset is expanded and shuffled in place (Fisher-Yates), which is
/// unbiased over all arrangements; ids are `1..=n` in output order.
pub fn shuffle_multiset(x: &Profile, seed: Seed) -> Result<InputSequence, Error> {
    let n = x.total();
    if n == 0 {
        return Err(Error::ZeroTotalProfile);
    }
    let mut values: Vec<Value> = Vec::with_capacity(n as usize);
    for (i, &count) in x.counts().iter().enumerate() {
        for _ in 0..count {
            values.push((i + 1) as Value);
        }
    }
    let mut rng = Rng::new(seed);
    for i in (1..values.len()).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        values.swap(i, j);
    }
    Ok(InputSequence::from_values(values))
}

/// Parameters of the profile-degeneracy predicate: an input is degenerate
/// when some universe value appears fewer than `k` times among its first
/// `ceil(n^nu)` elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyParams {
    nu: f64,
    k: u32,
}

impl DegeneracyParams {
    pub fn new(nu: f64, k: u32) -> Result<Self, Error> {
        if !(nu.is_finite() && (0.0..1.0).contains(&nu)) {
            return Err(Error::ParameterOutOfRange { name: "nu" });
        }
        if k == 0 {
            return Err(Error::ParameterOutOfRange { name: "k" });
        }
        Ok(DegeneracyParams { nu, k })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// The prefix length `n_T = ceil(n^nu)`, clamped into `1..=n`.
    ///
    /// Exact powers are snapped to the nearest integer before taking the
    /// ceiling so that float slop (e.g. `100^0.5 = 10.000000000000002`)
    /// cannot shift the prefix by one.
    pub fn prefix_len(self, n: u64) -> u64 {
        let raw = libm::pow(n as f64, self.nu);
        let nearest = libm::round(raw);
        let ceiled = if (raw - nearest).abs() < 1e-9 {
            nearest
        } else {
            libm::ceil(raw)
        };
        (ceiled as u64).clamp(1, n.max(1))
    }
}

/// True iff some value of `1..=u` appears fewer than `k` times among the
/// first `n_T` elements of `seq`.
pub fn is_profile_degenerate(
    seq: &InputSequence,
    params: DegeneracyParams,
    u: u32,
) -> Result<bool, Error> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    seq.validate_universe(u)?;
    let n_t = params.prefix_len(seq.len() as u64) as usize;
    let mut counts = vec![0u64; u as usize];
    for it in &seq.items()[..n_t] {
        counts[(it.value - 1) as usize] += 1;
    }
    Ok(counts.iter().any(|&c| c < u64::from(params.k)))
}

/// Parses whitespace-separated positive raw weights and normalizes them.
///
/// This is the on-disk distribution format: plain text, one or more
/// positive reals separated by any whitespace.
pub fn parse_weights(text: &str) -> Result<UniverseDistribution, Error> {
    let mut raw = Vec::new();
    for tok in text.split_whitespace() {
        let w: f64 = tok
            .parse::<f64>()
            .map_err(|_| Error::NonPositiveWeight { index: raw.len() })?;
        raw.push(w);
    }
    UniverseDistribution::from_weights(&raw)
}

/// Renders weights in the on-disk format (space separated).
pub fn format_weights(q: &UniverseDistribution) -> String {
    let mut out = String::new();
    for (i, w) in q.weights().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&alloc::format!("{w}"));
    }
    out
}
