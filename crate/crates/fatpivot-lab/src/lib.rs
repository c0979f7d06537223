//! Experiment harness for the `fatpivot` library: configurations, the five
//! experiment runners (equivalence, cost, height, degeneracy, exact), and
//! the deterministic JSON/CSV report formats used by the `fatpivot` CLI.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{DistSpec, ExperimentConfig, ExperimentKind, Tolerances};
pub use experiments::{
    check_equivalence, run_cost, run_degeneracy, run_equivalence, run_exact, run_experiment,
    run_height, saturated_tree_cost_sample, standard_battery, EquivalenceMismatch, RunOutput,
};
pub use report::{render_csv, CsvRow, ExperimentReport, Verdict, VerdictRule};
