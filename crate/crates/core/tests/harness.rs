use qroute::experiment::Variant;
use qroute::harness::{parse_config, run_sweep, ExperimentConfig};

const RESULTS_GOLDEN: &str = "gamma,rep,F,P_est,P_theory,p1_theory,shots_kept";
const SUMMARY_GOLDEN: &str =
    "gamma,mean_F,two_sigma_F,mean_P_est,two_sigma_P,P_theory,p1_theory,shots_kept_total";

fn config(doc: serde_json::Value) -> ExperimentConfig {
    parse_config(&doc.to_string()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn empty_document_gives_defaults() {
    let c = parse_config("{}").unwrap();
    assert_eq!(c.gamma_grid.len(), 11);
    assert!((c.gamma_grid[10] - 1.0).abs() < 1e-15);
    assert_eq!(c.gamma_guess, 0.5);
    assert_eq!(c.shots_per_setting, 100_000);
    assert_eq!(c.repetitions, 10);
    assert_eq!(c.variant, Variant::BothQubits);
}

#[test]
fn signal_only_with_mitigation_is_valid() {
    let c = parse_config(r#"{"variant":"signal-only","mitigation":true}"#).unwrap();
    assert_eq!(c.variant, Variant::SignalOnly);
}

#[test]
fn csv_headers_match_golden() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(serde_json::json!({
        "gamma_grid": [0.2],
        "shots_per_setting": 200,
        "repetitions": 1,
        "output_dir": dir.path(),
    }));
    run_sweep(&c).unwrap();
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(results.lines().next(), Some(RESULTS_GOLDEN));
    assert_eq!(summary.lines().next(), Some(SUMMARY_GOLDEN));
}

#[test]
fn default_grid_theory_column() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(serde_json::json!({
        "shots_per_setting": 100,
        "repetitions": 1,
        "output_dir": dir.path(),
    }));
    run_sweep(&c).unwrap();
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let gammas = column(&summary, "gamma");
    let theory = column(&summary, "P_theory");
    assert_eq!(gammas.len(), 11);
    for (g, p) in gammas.iter().zip(theory) {
        let want = ((3.0 - 2.0 * g) / (3.0 * (2.0 - g))).powi(2);
        assert!((p - want).abs() < 1e-12, "gamma {g}: {p} vs {want}");
    }
}

#[test]
fn noiseless_single_point_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(serde_json::json!({
        "gamma_grid": [0.0],
        "variant": "no-noise",
        "repetitions": 1,
        "output_dir": dir.path(),
    }));
    let report = run_sweep(&c).unwrap();
    let row = &report.rows[0];
    assert!(row.mean_f >= 0.99, "{}", row.mean_f);
    assert_eq!(row.p_theory, 1.0);
    assert_eq!(row.two_sigma_f, 0.0);
}

#[test]
fn unwritable_output_fails_before_simulating() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let c = config(serde_json::json!({
        "output_dir": blocker.join("sub"),
    }));
    let start = std::time::Instant::now();
    assert!(run_sweep(&c).is_err());
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
