//! Experiment configuration: distribution specs, experiment kinds, and the
//! tolerances every verdict is checked against.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fatpivot::inputgen::parse_weights;
use fatpivot::model::UniverseDistribution;

/// A distribution given on the command line: `uniform:U`, `two:P`, or
/// `weights:PATH` (a plain-text file of whitespace-separated positive raw
/// weights, normalized on load).
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Uniform(u32),
    Two(f64),
    Weights(PathBuf),
}

impl DistSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| {
            format!("bad distribution `{s}`: expected uniform:U, two:P, or weights:PATH")
        })?;
        match kind {
            "uniform" => {
                let u: u32 = arg
                    .parse()
                    .map_err(|_| format!("bad universe size `{arg}`"))?;
                if u == 0 {
                    return Err("universe size must be at least 1".into());
                }
                Ok(DistSpec::Uniform(u))
            }
            "two" => {
                let p: f64 = arg
                    .parse()
                    .map_err(|_| format!("bad probability `{arg}`"))?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(format!("two:p needs p strictly between 0 and 1, got {p}"));
                }
                Ok(DistSpec::Two(p))
            }
            "weights" => Ok(DistSpec::Weights(PathBuf::from(arg))),
            other => Err(format!("unknown distribution kind `{other}`")),
        }
    }

    pub fn load(&self) -> Result<UniverseDistribution, String> {
        match self {
            DistSpec::Uniform(u) => Ok(UniverseDistribution::uniform(*u)),
            DistSpec::Two(p) => UniverseDistribution::two(*p).map_err(|e| e.to_string()),
            DistSpec::Weights(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_weights(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Uniform(u) => write!(f, "uniform:{u}"),
            DistSpec::Two(p) => write!(f, "two:{p}"),
            DistSpec::Weights(path) => write!(f, "weights:{}", path.display()),
        }
    }
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Equiv,
    Cost,
    Height,
    Degeneracy,
    Exact,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "equiv" => Ok(ExperimentKind::Equiv),
            "cost" => Ok(ExperimentKind::Cost),
            "height" => Ok(ExperimentKind::Height),
            "degeneracy" => Ok(ExperimentKind::Degeneracy),
            "exact" => Ok(ExperimentKind::Exact),
            other => Err(format!(
                "unknown experiment `{other}` (expected equiv, cost, height, degeneracy, or exact)"
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Equiv => "equiv",
            ExperimentKind::Cost => "cost",
            ExperimentKind::Height => "height",
            ExperimentKind::Degeneracy => "degeneracy",
            ExperimentKind::Exact => "exact",
        }
    }
}

/// Verdict tolerances. Defaults:
///
/// * `cost_rel = 0.02` — Monte-Carlo mean partition comparisons per element
///   vs. the exact search-cost DP. Justified by the `±(c+2)ku` insert-vs-
///   search slack (about 1e-3 per element at n = 1e5, u = 8, k = 3) plus
///   sampling noise of a few standard errors.
/// * `identity_abs = 1e-10` — algebraic identities (entropy aggregation).
/// * `dp_vs_closed = 1e-9` — the DP against closed forms it must reproduce.
/// * `degeneracy_freq = 0.01` — empirical degeneracy frequency when the
///   exact union bound is already negligible.
/// * `mc_sigma = 6.0` — Monte-Carlo sanity band, in standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cost_rel: f64,
    pub identity_abs: f64,
    pub dp_vs_closed: f64,
    pub degeneracy_freq: f64,
    pub mc_sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cost_rel: 0.02,
            identity_abs: 1e-10,
            dp_vs_closed: 1e-9,
            degeneracy_freq: 0.01,
            mc_sigma: 6.0,
        }
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dist: DistSpec,
    pub n: u64,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    /// Degeneracy prefix exponent (degeneracy experiment only).
    pub nu: Option<f64>,
    /// Worker threads for trial execution; results are identical for any
    /// thread count.
    pub threads: usize,
    /// Enumeration limits for the exact experiment.
    pub exact_max_total: u64,
    pub exact_max_universe: u32,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, dist: DistSpec) -> Self {
        ExperimentConfig {
            kind,
            dist,
            n: 1000,
            k: 1,
            trials: 100,
            seed: 0,
            nu: None,
            threads: 1,
            exact_max_total: 7,
            exact_max_universe: 4,
            tolerances: Tolerances::default(),
        }
    }
}
