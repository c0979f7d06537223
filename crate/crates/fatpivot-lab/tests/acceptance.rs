//! Acceptance suite: thirteen numbered criteria pinning the analytic
//! constants, the sort/tree correspondence, the exact average-case
//! identities, the cost and height simulations, and report determinism.
//! Every tolerance is stated inline; run with `--nocapture` to see one
//! pass/fail line per criterion.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use fatpivot::analysis::{
    alpha_k, bound_constants, brute_force_multiset, entropy_ld, entropy_ln, expected_beta_entropy,
    expected_beta_entropy_quadrature, expected_search_cost_dp, hoelder_constant, pivot_pmf,
    qs_entropy, sedgewick_exact_rational, BoundKind, CountConvention,
};
use fatpivot::fringe::FringeTree;
use fatpivot::inputgen::{IidStream, Rng, Seed};
use fatpivot::model::{ComparisonLedger, InputSequence, SampleParams, UniverseDistribution};
use fatpivot::quicksort::quicksort_k_with;
use fatpivot_lab::config::{DistSpec, ExperimentConfig, ExperimentKind, Tolerances};
use fatpivot_lab::experiments::{
    run_cost, run_exact, run_height, saturated_tree_cost_sample, standard_battery,
};

/// Prints exactly one `pass` / `FAIL` line per criterion, then propagates
/// any failure to the test harness.
fn criterion<F: FnOnce() + UnwindSafe>(number: u32, name: &str, body: F) {
    let result = catch_unwind(body);
    println!(
        "[acceptance] criterion {number:02} ({name}): {}",
        if result.is_ok() { "pass" } else { "FAIL" }
    );
    if let Err(panic) = result {
        resume_unwind(panic);
    }
}

fn params(k: u32) -> SampleParams {
    SampleParams::with_k(k).unwrap()
}

/// A seeded random distribution with u in 2..=max_u and weights in (0, 1].
fn random_distribution(rng: &mut Rng, max_u: u64) -> UniverseDistribution {
    let u = 2 + rng.below(max_u - 1) as usize;
    let raw: Vec<f64> = (0..u).map(|_| rng.next_f64() + 0.01).collect();
    UniverseDistribution::from_weights(&raw).unwrap()
}

#[test]
fn acceptance_01_alpha_k_table() {
    criterion(1, "alpha_k table and savings", || {
        let table = [
            (1u32, 1.38629),
            (3, 1.18825),
            (5, 1.12402),
            (7, 1.09239),
            (9, 1.07359),
        ];
        for (k, want) in table {
            let got = alpha_k(k).unwrap();
            assert!((got - want).abs() < 1e-5, "alpha_{k} = {got}, want {want}");
        }
        let a1 = alpha_k(1).unwrap();
        let savings = [(3u32, 14.3), (5, 18.9), (7, 21.2), (9, 22.6)];
        for (k, want_pct) in savings {
            let got_pct = 100.0 * (1.0 - alpha_k(k).unwrap() / a1);
            assert!(
                (got_pct - want_pct).abs() <= 0.1,
                "saving at k={k}: {got_pct:.3}% vs {want_pct}%"
            );
        }
    });
}

#[test]
fn acceptance_02_hoelder_constant() {
    criterion(2, "Hoelder constant h=0.99", || {
        let c = hoelder_constant(0.99).unwrap();
        assert!((c - 37.61).abs() <= 0.05, "C_0.99 = {c}");
    });
}

#[test]
fn acceptance_03_beta_entropy() {
    criterion(3, "beta split entropy: quadrature vs closed form", || {
        for t in 0..=5 {
            let quad = expected_beta_entropy_quadrature(t);
            let exact = expected_beta_entropy(t);
            assert!((quad - exact).abs() <= 1e-8, "t={t}: |{quad} - {exact}|");
        }
        assert_eq!(expected_beta_entropy(0), 0.5);
    });
}

#[test]
fn acceptance_04_recursion_tree_equivalence() {
    criterion(4, "sort/insert equivalence, zero tolerance", || {
        let ks = [1u32, 3, 5];

        let check = |values: &[u32], k: u32| {
            let seq = InputSequence::from_values(values.iter().copied());
            let p = params(k);
            let mut sort_ledger = ComparisonLedger::new();
            let (_, tree) = quicksort_k_with(&seq, p, &mut sort_ledger);
            let mut insert_ledger = ComparisonLedger::new();
            let mut fringe = FringeTree::new(p);
            fringe.insert_all(seq.items(), &mut insert_ledger);
            assert_eq!(
                tree.shape_digest(),
                fringe.shape_digest(),
                "shape mismatch: k={k} input={values:?}"
            );
            assert_eq!(
                sort_ledger.event_multiset(),
                insert_ledger.event_multiset(),
                "event mismatch: k={k} input={values:?}"
            );
        };

        // 1000 randomized trials spanning k in {1,3,5}, u in 1..=8, n in 1..=200.
        let mut checked = 0u32;
        for trial in 0..1000u64 {
            let mut rng = Rng::for_trial(Seed(0xEC41), trial);
            let k = ks[rng.below(3) as usize];
            let u = 1 + rng.below(8) as u32;
            let n = 1 + rng.below(200) as usize;
            let values: Vec<u32> = (0..n).map(|_| 1 + rng.below(u64::from(u)) as u32).collect();
            check(&values, k);
            checked += 1;
        }
        assert_eq!(checked, 1000);

        // Adversarial inputs: all-equal and sorted (both directions).
        for k in ks {
            for u in 1..=8u32 {
                check(&vec![u; 64], k);
                let ramp: Vec<u32> = (0..64).map(|i| i % u + 1).collect();
                let mut sorted = ramp.clone();
                sorted.sort_unstable();
                check(&sorted, k);
                let mut reversed = sorted.clone();
                reversed.reverse();
                check(&reversed, k);
            }
        }
    });
}

#[test]
fn acceptance_05_sedgewick_exactness() {
    criterion(5, "exact average 2Q(x)+n-u over all small profiles", || {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Exact, DistSpec::Uniform(4));
        cfg.exact_max_total = 7;
        cfg.exact_max_universe = 4;
        cfg.trials = 200;
        cfg.seed = 5;
        let out = run_exact(&cfg).unwrap();
        let block = out.report.exact.clone().unwrap();
        assert_eq!(block.profiles_checked, 98);
        assert_eq!(block.equality_mismatches, 0);
        assert!(out.report.pass, "{}", out.report.render_text());

        // Spot-check the rational fixtures directly.
        let x = fatpivot::Profile::new(vec![2, 1]);
        let oracle = brute_force_multiset(&x, params(1), CountConvention::Sedgewick).unwrap();
        assert_eq!(oracle, sedgewick_exact_rational(&x).unwrap());
        assert_eq!((oracle.numerator(), oracle.denominator()), (7, 3));
    });
}

#[test]
fn acceptance_06_allen_munro_consistency() {
    criterion(6, "DP(k=1) equals 2Q(q)+1 within 1e-9", || {
        let tol = Tolerances::default().dp_vs_closed;
        let mut rng = Rng::new(Seed(0xA11E));
        for i in 0..100 {
            let q = random_distribution(&mut rng, 40);
            let dp = expected_search_cost_dp(&q, params(1));
            let closed = 2.0 * qs_entropy(q.weights()) + 1.0;
            assert!(
                (dp - closed).abs() <= tol,
                "case {i} (u={}): |{dp} - {closed}|",
                q.universe_size()
            );
        }
    });
}

#[test]
fn acceptance_07_dp_vs_saturated_simulation() {
    criterion(
        7,
        "mean node depth of 1e4 saturated trees within 4 SE of DP",
        || {
            let q = UniverseDistribution::uniform(8);
            let p = params(3);
            let (mean, se) = saturated_tree_cost_sample(&q, p, 10_000, 2026, 1_000_000).unwrap();
            let dp = expected_search_cost_dp(&q, p);
            assert!(
                (mean - dp).abs() <= 4.0 * se,
                "mean={mean} dp={dp} se={se} ({} sigma)",
                (mean - dp).abs() / se
            );
        },
    );
}

#[test]
fn acceptance_08_bound_sandwich() {
    criterion(8, "search-cost sandwich holds for every valid eps", || {
        let mut dists: Vec<UniverseDistribution> = [2u32, 4, 16, 64]
            .iter()
            .map(|&u| UniverseDistribution::uniform(u))
            .collect();
        let mut rng = Rng::new(Seed(0x5A2D));
        for _ in 0..50 {
            dists.push(random_distribution(&mut rng, 64));
        }

        let eps_grid = [0.01, 0.02, 0.05, 0.1];
        let mut checked = 0u32;
        for q in &dists {
            let h_ln = entropy_ln(q.weights());
            for k in [1u32, 3, 5] {
                let p = params(k);
                let dp = expected_search_cost_dp(q, p);
                for eps in eps_grid {
                    let upper = bound_constants(BoundKind::Upper, p, eps).unwrap();
                    if upper.valid {
                        assert!(
                            dp <= upper.c * h_ln + upper.d + 1e-9,
                            "upper violated: u={} k={k} eps={eps}: {dp} > {}",
                            q.universe_size(),
                            upper.c * h_ln + upper.d
                        );
                        checked += 1;
                    }
                    let lower = bound_constants(BoundKind::Lower, p, eps).unwrap();
                    if lower.valid {
                        assert!(
                            dp >= lower.c * h_ln - lower.d - 1e-9,
                            "lower violated: u={} k={k} eps={eps}: {dp} < {}",
                            q.universe_size(),
                            lower.c * h_ln - lower.d
                        );
                        checked += 1;
                    }
                }
            }
        }
        // The grid must actually exercise the sandwich, not skip it.
        assert!(checked > 1000, "only {checked} valid (kind, eps) checks");
    });
}

/// The suite's cost experiments; criterion 9 checks the first against the
/// DP and criterion 10 checks the lower bound on all of them.
fn cost_experiments() -> Vec<ExperimentConfig> {
    let mut big = ExperimentConfig::new(ExperimentKind::Cost, DistSpec::Uniform(8));
    big.n = 100_000;
    big.k = 3;
    big.trials = 200;
    big.seed = 2026;

    let mut two_point = ExperimentConfig::new(ExperimentKind::Cost, DistSpec::Uniform(2));
    two_point.n = 10_000;
    two_point.k = 1;
    two_point.trials = 100;
    two_point.seed = 2027;

    let mut skewed = ExperimentConfig::new(ExperimentKind::Cost, DistSpec::Two(0.2));
    skewed.n = 10_000;
    skewed.k = 5;
    skewed.trials = 100;
    skewed.seed = 2028;

    vec![big, two_point, skewed]
}

#[test]
fn acceptance_09_cost_matches_dp_at_scale() {
    criterion(
        9,
        "mean partition cost within 2% of DP (u=8, k=3, n=1e5)",
        || {
            let cfg = &cost_experiments()[0];
            let out = run_cost(cfg).unwrap();
            let verdict = out
                .report
                .verdicts
                .iter()
                .find(|v| v.name == "partition_mean_near_dp")
                .expect("cost verdict present");
            assert!(
                verdict.pass,
                "observed {} vs dp {} beyond 2%",
                verdict.observed, verdict.reference
            );
            assert!(out.report.pass, "{}", out.report.render_text());
        },
    );
}

#[test]
fn acceptance_10_lower_bound_inequality() {
    criterion(
        10,
        "mean total comparisons beat the entropy lower bound",
        || {
            for cfg in cost_experiments() {
                let out = run_cost(&cfg).unwrap();
                let verdict = out
                    .report
                    .verdicts
                    .iter()
                    .find(|v| v.name == "mean_total_ge_lower_bound")
                    .expect("lower-bound verdict present");
                assert!(
                    verdict.pass,
                    "{}: mean total {} below bound {}",
                    cfg.dist, verdict.observed, verdict.reference
                );
            }
        },
    );
}

#[test]
fn acceptance_11_height_never_exceeds_13_ln_n() {
    criterion(
        11,
        "zero trees higher than 13 ln n (1e4 trees, n=1e4)",
        || {
            for k in [1u32, 3] {
                let mut cfg =
                    ExperimentConfig::new(ExperimentKind::Height, DistSpec::Uniform(10_000));
                cfg.n = 10_000;
                cfg.k = k;
                cfg.trials = 10_000;
                cfg.seed = 42;
                let out = run_height(&cfg).unwrap();
                let h = out.report.height.clone().unwrap();
                assert_eq!(h.exceed_count, 0, "k={k}: max height {}", h.max_height);
                assert!(out.report.pass);
            }
        },
    );
}

#[test]
fn acceptance_12_analytic_identities() {
    criterion(
        12,
        "aggregation identity, pivot law, entropy comparison",
        || {
            // Entropy aggregation residual at 1e-10 on 100 random (q, v) pairs.
            let tol = Tolerances::default().identity_abs;
            let mut rng = Rng::new(Seed(0x1DE7));
            for _ in 0..100 {
                let q = random_distribution(&mut rng, 30);
                let v = 1 + rng.below(u64::from(q.universe_size())) as u32;
                let residual = fatpivot::analysis::entropy_aggregation_residual(&q, v).unwrap();
                assert!(residual.abs() <= tol, "residual {residual} at v={v}");
            }

            // Pivot law sums to one and matches empirical median-of-5 frequencies.
            let q = UniverseDistribution::from_weights(&[1.0, 3.0, 2.0, 1.0, 3.0]).unwrap();
            let p5 = params(5);
            let pmf = pivot_pmf(&q, p5);
            assert!((pmf.iter().sum::<f64>() - 1.0).abs() <= 1e-12);

            let samples = 100_000u64;
            let mut counts = [0u64; 5];
            let mut stream = IidStream::new(q.clone(), Rng::new(Seed(0xBEDA)));
            let mut ledger = ComparisonLedger::counting_only();
            for _ in 0..samples {
                let draw: Vec<u32> = (0..5).map(|_| stream.next_item().value).collect();
                let median = fatpivot::select_median(&draw, &mut ledger);
                counts[(median - 1) as usize] += 1;
            }
            for v in 0..5 {
                let freq = counts[v] as f64 / samples as f64;
                let sigma = (pmf[v] * (1.0 - pmf[v]) / samples as f64).sqrt();
                assert!(
                    (freq - pmf[v]).abs() <= 5.0 * sigma,
                    "value {}: freq {freq} vs pmf {} (sigma {sigma})",
                    v + 1,
                    pmf[v]
                );
            }

            // Q(q) <= H_ld(q) ln 2 on 1000 random distributions.
            let mut rng = Rng::new(Seed(0x0B5E));
            for _ in 0..1000 {
                let q = random_distribution(&mut rng, 48);
                let qs = qs_entropy(q.weights());
                let cap = entropy_ld(q.weights()) * std::f64::consts::LN_2;
                assert!(qs <= cap + 1e-12, "Q={qs} exceeds H ln2 = {cap}");
            }
        },
    );
}

#[test]
fn acceptance_13_deterministic_reports() {
    criterion(13, "battery reruns are byte-identical", || {
        let first = standard_battery(7).unwrap();
        let second = standard_battery(7).unwrap();
        assert!(first == second, "battery output differs between runs");
        assert!(first.contains("\"schema_version\": \"fatpivot-report/1\""));

        // Thread count must not influence the bytes either.
        let mut cfg = ExperimentConfig::new(ExperimentKind::Cost, DistSpec::Uniform(8));
        cfg.n = 5_000;
        cfg.k = 3;
        cfg.trials = 40;
        cfg.seed = 7;
        let serial = run_cost(&cfg).unwrap().report.to_json();
        cfg.threads = 4;
        let parallel = run_cost(&cfg).unwrap().report.to_json();
        assert!(serial == parallel, "parallel report differs from serial");
    });
}
