//! Command-line interface: sort and inspect concrete inputs, evaluate the
//! analytic quantities, and drive the simulation experiments.
//!
//! Exit codes: 0 on success / all verdicts passing, 1 on a verdict or
//! validity failure, 2 on usage errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fatpivot::analysis::{
    allen_munro_cost, alpha_k, best_height_constants, bound_constants, entropy_ld, entropy_ln,
    expected_search_cost_dp, height_constants, hoelder_constant, qs_entropy, sorting_lower_bound,
    BoundKind,
};
use fatpivot::model::{ComparisonLedger, InputSequence, SampleParams};
use fatpivot::quicksort::{quicksort_k, sedgewick_count};
use fatpivot::FringeTree;
use fatpivot_lab::config::{DistSpec, ExperimentConfig, ExperimentKind};
use fatpivot_lab::experiments::run_experiment;
use fatpivot_lab::report::{render_csv, ExperimentReport};

#[derive(Parser)]
#[command(
    name = "fatpivot",
    version,
    about = "Instrumented fat-pivot median-of-k quicksort and fringe-balanced tree laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InputArgs {
    /// Whitespace-separated values, e.g. --values "7 4 2 9".
    #[arg(long)]
    values: Option<String>,
    /// Read values from a file ("-" for stdin).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl InputArgs {
    fn read(&self) -> Result<InputSequence, String> {
        let text = match (&self.values, &self.file) {
            (Some(v), None) => v.clone(),
            (None, Some(path)) if path.as_os_str() == "-" => {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| format!("cannot read stdin: {e}"))?;
                buf
            }
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
            _ => return Err("provide exactly one of --values or --file".into()),
        };
        let mut values = Vec::new();
        for tok in text.split_whitespace() {
            let v: u32 = tok.parse().map_err(|_| format!("bad value `{tok}`"))?;
            if v == 0 {
                return Err("values must be at least 1".into());
            }
            values.push(v);
        }
        Ok(InputSequence::from_values(values))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sort values with instrumented median-of-k quicksort.
    Sort {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        input: InputArgs,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Build a fringe-balanced tree by successive insertion and show its
    /// shape digest (and node depths, when saturated over --u).
    Tree {
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Universe size for the saturation check and node depths.
        #[arg(long)]
        u: Option<u32>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the analytic quantities for a distribution.
    Exact {
        /// uniform:U, two:P, or weights:PATH.
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Input size for the total-comparison lower bound.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Evaluate the search-cost bound constants (and optionally the
    /// height-bound constants) for given parameters.
    Bounds {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: f64,
        /// upper or lower.
        #[arg(long)]
        kind: String,
        /// Also evaluate the height-bound constants at this c.
        #[arg(long)]
        height_c: Option<f64>,
        /// Balance parameter for the height bound (grid-optimized if absent).
        #[arg(long)]
        alpha: Option<f64>,
        /// Also evaluate the entropy Hölder constant at this exponent.
        #[arg(long)]
        hoelder_h: Option<f64>,
    },
    /// Run a simulation experiment and print its JSON report.
    Simulate {
        /// equiv, cost, height, degeneracy, or exact.
        #[arg(long)]
        experiment: String,
        /// uniform:U, two:P, or weights:PATH.
        #[arg(long)]
        dist: Option<String>,
        /// Shorthand for --dist uniform:U.
        #[arg(long)]
        u: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degeneracy prefix exponent in [0, 1).
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Relative tolerance for the cost-vs-DP verdict.
        #[arg(long)]
        cost_tol: Option<f64>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-trial CSV rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render a stored JSON report, recomputing its verdicts.
    Report {
        /// Path to a report produced by `simulate`.
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode, String> {
    match cmd {
        Cmd::Sort { k, input, json } => cmd_sort(k, &input, json),
        Cmd::Tree { k, u, input, json } => cmd_tree(k, u, &input, json),
        Cmd::Exact { dist, k, n } => cmd_exact(&dist, k, n),
        Cmd::Bounds {
            k,
            eps,
            kind,
            height_c,
            alpha,
            hoelder_h,
        } => cmd_bounds(k, eps, &kind, height_c, alpha, hoelder_h),
        Cmd::Simulate {
            experiment,
            dist,
            u,
            n,
            k,
            trials,
            seed,
            nu,
            threads,
            cost_tol,
            out,
            csv,
        } => cmd_simulate(
            &experiment,
            dist.as_deref(),
            u,
            n,
            k,
            trials,
            seed,
            nu,
            threads,
            cost_tol,
            out,
            csv,
        ),
        Cmd::Report { input } => cmd_report(&input),
    }
}

fn sample_params(k: u32) -> Result<SampleParams, String> {
    SampleParams::with_k(k).map_err(|e| e.to_string())
}

fn cmd_sort(k: u32, input: &InputArgs, json: bool) -> Result<ExitCode, String> {
    let params = sample_params(k)?;
    let seq = input.read()?;
    let out = quicksort_k(&seq, params);
    let sorted: Vec<u32> = out.sorted.values().collect();
    let sedgewick = sedgewick_count(&out.ledger).map_err(|e| e.to_string())?;
    if json {
        let doc = json!({
            "k": k,
            "n": seq.len(),
            "sorted": sorted,
            "ledger": {
                "partition_cmps": out.ledger.partition_cmps,
                "median_cmps": out.ledger.median_cmps,
                "insertionsort_cmps": out.ledger.insertionsort_cmps,
                "steps": out.ledger.steps,
                "total_cmps": out.ledger.total_cmps(),
                "sedgewick_count": sedgewick,
            },
            "tree_height": out.tree.height(),
            "shape_digest": out.tree.shape_digest(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("valid json")
        );
    } else {
        println!(
            "sorted: {}",
            sorted
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        println!(
            "comparisons: partition={} median={} insertionsort={} steps={} sedgewick={}",
            out.ledger.partition_cmps,
            out.ledger.median_cmps,
            out.ledger.insertionsort_cmps,
            out.ledger.steps,
            sedgewick
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tree(k: u32, u: Option<u32>, input: &InputArgs, json: bool) -> Result<ExitCode, String> {
    let params = sample_params(k)?;
    let seq = input.read()?;
    if let Some(u) = u {
        seq.validate_universe(u).map_err(|e| e.to_string())?;
    }
    let mut tree = FringeTree::new(params);
    let mut ledger = ComparisonLedger::new();
    tree.insert_all(seq.items(), &mut ledger);
    let depths = u.and_then(|u| tree.node_depths(u).ok());
    if json {
        let doc = json!({
            "k": k,
            "n": seq.len(),
            "shape_digest": tree.shape_digest(),
            "height": tree.height(),
            "inner_nodes": tree.inner_nodes(),
            "saturated": u.map(|u| tree.is_saturated(u)),
            "node_depths": depths.as_ref().map(|d| d.depths().to_vec()),
            "insert_cmps": {
                "partition_cmps": ledger.partition_cmps,
                "median_cmps": ledger.median_cmps,
                "steps": ledger.steps,
            },
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("valid json")
        );
    } else {
        println!("digest: {}", tree.shape_digest());
        println!(
            "height: {}  inner nodes: {}",
            tree.height(),
            tree.inner_nodes()
        );
        match (&depths, u) {
            (Some(d), _) => println!(
                "node depths: {}",
                d.depths()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            (None, Some(u)) => println!("not saturated over 1..={u}: no node-depth vector"),
            (None, None) => {}
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_exact(dist: &str, k: u32, n: Option<u64>) -> Result<ExitCode, String> {
    let params = sample_params(k)?;
    let q = DistSpec::parse(dist)?.load()?;
    let h_ld = entropy_ld(q.weights());
    let a_k = alpha_k(k).map_err(|e| e.to_string())?;
    let doc = json!({
        "dist": dist,
        "universe": q.universe_size(),
        "k": k,
        "entropy_ld": h_ld,
        "entropy_ln": entropy_ln(q.weights()),
        "qs_entropy": qs_entropy(q.weights()),
        "alpha_k": a_k,
        "alpha_k_times_entropy": a_k * h_ld,
        "dp_search_cost": expected_search_cost_dp(&q, params),
        "allen_munro_k1": allen_munro_cost(&q),
        "lower_bound": n.map(|n| sorting_lower_bound(&q, n)),
        "n": n,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("valid json")
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(
    k: u32,
    eps: f64,
    kind: &str,
    height_c: Option<f64>,
    alpha: Option<f64>,
    hoelder_h: Option<f64>,
) -> Result<ExitCode, String> {
    let params = sample_params(k)?;
    let bound_kind = match kind {
        "upper" => BoundKind::Upper,
        "lower" => BoundKind::Lower,
        other => return Err(format!("bad --kind `{other}` (expected upper or lower)")),
    };
    let b = bound_constants(bound_kind, params, eps).map_err(|e| e.to_string())?;
    let mut all_valid = b.valid;

    let height = match height_c {
        Some(c) => {
            let hc = match alpha {
                Some(a) => Some(height_constants(params, c, a).map_err(|e| e.to_string())?),
                None => best_height_constants(params, c),
            };
            if let Some(hc) = &hc {
                all_valid &= hc.valid;
            } else {
                all_valid = false;
            }
            hc
        }
        None => None,
    };

    let hoelder = match hoelder_h {
        Some(h) => Some(hoelder_constant(h).map_err(|e| e.to_string())?),
        None => None,
    };

    let doc = json!({
        "k": k,
        "alpha_k": alpha_k(k).map_err(|e| e.to_string())?,
        "bound": {
            "kind": kind,
            "eps": b.eps,
            "c": b.c,
            "d": b.d,
            "expected_split_entropy": b.expected_split_entropy,
            "spacing_log_term": b.spacing_log_term,
            "valid": b.valid,
        },
        "height": height.map(|hc| json!({
            "c": hc.c,
            "alpha": hc.alpha,
            "p": hc.p,
            "delta": hc.delta,
            "eta": hc.eta,
            "valid": hc.valid,
        })),
        "hoelder_constant": hoelder,
        "all_valid": all_valid,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("valid json")
    );
    if all_valid {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("invalid constants: side condition violated (see `valid` flags)");
        Ok(ExitCode::from(1))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    experiment: &str,
    dist: Option<&str>,
    u: Option<u32>,
    n: u64,
    k: u32,
    trials: u64,
    seed: u64,
    nu: Option<f64>,
    threads: usize,
    cost_tol: Option<f64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let kind = ExperimentKind::parse(experiment)?;
    let dist = match (dist, u) {
        (Some(d), None) => DistSpec::parse(d)?,
        (None, Some(u)) => DistSpec::Uniform(u),
        (Some(_), Some(_)) => return Err("give either --dist or --u, not both".into()),
        (None, None) => return Err("give a distribution via --dist or --u".into()),
    };
    if trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    let mut cfg = ExperimentConfig::new(kind, dist);
    cfg.n = n;
    cfg.k = k;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.nu = nu;
    cfg.threads = threads;
    if let Some(tol) = cost_tol {
        cfg.tolerances.cost_rel = tol;
    }

    let run = run_experiment(&cfg)?;
    let rendered = run.report.to_json();
    match out {
        Some(path) => std::fs::write(&path, &rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    if let Some(path) = csv {
        std::fs::write(&path, render_csv(&run.csv))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if run.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_report(input: &PathBuf) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let report = ExperimentReport::from_json(&text)?;
    print!("{}", report.render_text());
    if !report.verdicts_consistent() {
        eprintln!("stored verdicts do not match their recomputation");
        return Ok(ExitCode::from(1));
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
