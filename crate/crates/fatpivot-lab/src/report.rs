//! Report schema: aggregate statistics, analytic reference values, and
//! verdicts, serialized as JSON with a fixed field order. A report is a
//! deterministic function of (config, seed): rerunning an experiment
//! reproduces it byte for byte, and every verdict can be recomputed from
//! the raw numbers stored next to it.

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Tolerances};

pub const SCHEMA_VERSION: &str = "fatpivot-report/1";

/// Echo of the configuration a report was produced from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub experiment: String,
    pub dist: String,
    pub universe: u32,
    pub n: u64,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub tolerances: Tolerances,
}

impl ConfigEcho {
    pub fn from_config(cfg: &ExperimentConfig, universe: u32) -> Self {
        ConfigEcho {
            experiment: cfg.kind.name().to_string(),
            dist: cfg.dist.to_string(),
            universe,
            n: cfg.n,
            k: cfg.k,
            trials: cfg.trials,
            seed: cfg.seed,
            nu: cfg.nu,
            tolerances: cfg.tolerances,
        }
    }
}

/// Mean, standard error, and range of one ledger category over the trials.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CategoryStats {
    pub mean: f64,
    pub std_error: f64,
    pub min: u64,
    pub max: u64,
}

impl CategoryStats {
    pub fn from_samples(samples: impl Iterator<Item = u64> + Clone) -> Self {
        let mut count = 0u64;
        let mut sum = 0.0;
        let mut min = u64::MAX;
        let mut max = 0u64;
        for x in samples.clone() {
            count += 1;
            sum += x as f64;
            min = min.min(x);
            max = max.max(x);
        }
        if count == 0 {
            return CategoryStats {
                mean: 0.0,
                std_error: 0.0,
                min: 0,
                max: 0,
            };
        }
        let mean = sum / count as f64;
        let std_error = if count > 1 {
            let ss: f64 = samples.map(|x| (x as f64 - mean).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        CategoryStats {
            mean,
            std_error,
            min,
            max,
        }
    }
}

/// Per-category comparison statistics across the trials.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LedgerStats {
    pub partition_cmps: CategoryStats,
    pub median_cmps: CategoryStats,
    pub insertionsort_cmps: CategoryStats,
    pub steps: CategoryStats,
    pub tree_height: CategoryStats,
    pub total_cmps_mean: f64,
}

/// Analytic reference values computed from the distribution alone.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnalyticBlock {
    pub entropy_ld: f64,
    pub entropy_ln: f64,
    pub qs_entropy: f64,
    pub alpha_k: f64,
    pub alpha_k_times_entropy: f64,
    /// Exact expected search cost in a saturated tree (the DP value).
    pub dp_search_cost: f64,
    pub lower_bound_total: f64,
    pub lower_bound_per_element: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EquivalenceBlock {
    pub matches: u64,
    pub mismatches: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<MismatchEcho>,
}

/// Echo of the first offending input so a mismatch can be replayed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MismatchEcho {
    pub trial: u64,
    pub stream_key: u64,
    pub input: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HeightBlock {
    pub threshold: f64,
    pub max_height: u32,
    pub exceed_count: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DegeneracyBlock {
    pub prefix_len: u64,
    pub degenerate_trials: u64,
    pub frequency: f64,
    /// Exact `P(Binomial(prefix_len, q_v) < k)` per universe value.
    pub per_value_tail: Vec<f64>,
    pub union_bound: f64,
    /// Prefix shorter than `k * u`: degeneracy is certain by pigeonhole.
    pub pigeonhole_certain: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExactBlock {
    pub profiles_checked: u64,
    pub equality_mismatches: u64,
    pub monte_carlo_trials_per_profile: u64,
    pub worst_monte_carlo_sigma: f64,
}

/// How a verdict's pass flag follows from its numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictRule {
    /// `|observed - reference| <= tolerance`.
    AbsDiffLe,
    /// `|observed - reference| <= tolerance * |reference|`.
    RelDiffLe,
    /// `observed >= reference` (tolerance unused).
    Ge,
    /// `observed <= reference` (tolerance unused).
    Le,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub rule: VerdictRule,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn check(
        name: &str,
        rule: VerdictRule,
        observed: f64,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        let pass = Self::evaluate(rule, observed, reference, tolerance);
        Verdict {
            name: name.to_string(),
            rule,
            observed,
            reference,
            tolerance,
            pass,
        }
    }

    pub fn evaluate(rule: VerdictRule, observed: f64, reference: f64, tolerance: f64) -> bool {
        match rule {
            VerdictRule::AbsDiffLe => (observed - reference).abs() <= tolerance,
            VerdictRule::RelDiffLe => (observed - reference).abs() <= tolerance * reference.abs(),
            VerdictRule::Ge => observed >= reference,
            VerdictRule::Le => observed <= reference,
        }
    }

    /// Re-derives the pass flag from the stored numbers.
    pub fn recompute(&self) -> bool {
        Self::evaluate(self.rule, self.observed, self.reference, self.tolerance)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub experiment: String,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger_stats: Option<LedgerStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<DegeneracyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactBlock>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn finalize(mut self) -> Self {
        self.pass = self.verdicts.iter().all(|v| v.pass);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("bad report JSON: {e}"))
    }

    /// True iff every stored pass flag (and the overall flag) matches what
    /// the stored numbers imply.
    pub fn verdicts_consistent(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass == v.recompute())
            && self.pass == self.verdicts.iter().all(|v| v.pass)
    }

    /// Human-readable rendering, one line per verdict.
    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "experiment: {} ({})",
            self.experiment, self.config.dist
        );
        let _ = writeln!(
            out,
            "  n={} k={} trials={} seed={}",
            self.config.n, self.config.k, self.config.trials, self.config.seed
        );
        if let Some(a) = &self.analytic {
            let _ = writeln!(
                out,
                "  H_ld={:.6} dp={:.6} alpha_k*H={:.6} lower/n={:.6}",
                a.entropy_ld, a.dp_search_cost, a.alpha_k_times_entropy, a.lower_bound_per_element
            );
        }
        if let Some(l) = &self.ledger_stats {
            let _ = writeln!(
                out,
                "  partition: mean={:.3} se={:.3} min={} max={}",
                l.partition_cmps.mean,
                l.partition_cmps.std_error,
                l.partition_cmps.min,
                l.partition_cmps.max
            );
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "  [{}] {}: observed={:.9} reference={:.9} tol={:.3e}",
                if v.pass { "pass" } else { "FAIL" },
                v.name,
                v.observed,
                v.reference,
                v.tolerance
            );
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}

/// One per-trial CSV row of a simulation.
#[derive(Debug, Clone, Copy)]
pub struct CsvRow {
    pub trial: u64,
    pub n: u64,
    pub k: u32,
    pub u: u32,
    pub partition_cmps: u64,
    pub median_cmps: u64,
    pub insertionsort_cmps: u64,
    pub steps: u64,
    pub tree_height: u32,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "trial,n,k,u,partition_cmps,median_cmps,insertionsort_cmps,steps,tree_height,seed";

pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.n,
            r.k,
            r.u,
            r.partition_cmps,
            r.median_cmps,
            r.insertionsort_cmps,
            r.steps,
            r.tree_height,
            r.seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_stats_basics() {
        let s = CategoryStats::from_samples([2u64, 4, 6].into_iter());
        assert_eq!(s.mean, 4.0);
        assert_eq!((s.min, s.max), (2, 6));
        // sample stddev = 2, se = 2/sqrt(3)
        assert!((s.std_error - 2.0 / 3.0_f64.sqrt()).abs() < 1e-12);
        let single = CategoryStats::from_samples([5u64].into_iter());
        assert_eq!(single.std_error, 0.0);
    }

    #[test]
    fn verdict_rules() {
        assert!(Verdict::check("a", VerdictRule::AbsDiffLe, 1.0, 1.005, 0.01).pass);
        assert!(!Verdict::check("a", VerdictRule::AbsDiffLe, 1.0, 1.5, 0.01).pass);
        assert!(Verdict::check("b", VerdictRule::RelDiffLe, 102.0, 100.0, 0.02).pass);
        assert!(Verdict::check("c", VerdictRule::Ge, 3.0, 2.0, 0.0).pass);
        assert!(Verdict::check("d", VerdictRule::Le, 0.0, 0.0, 0.0).pass);
    }

    #[test]
    fn csv_rendering() {
        let rows = [CsvRow {
            trial: 0,
            n: 10,
            k: 3,
            u: 5,
            partition_cmps: 25,
            median_cmps: 6,
            insertionsort_cmps: 2,
            steps: 4,
            tree_height: 3,
            seed: 42,
        }];
        let text = render_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "0,10,3,5,25,6,2,4,3,42");
    }
}
