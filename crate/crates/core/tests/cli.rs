use std::path::Path;
use std::process::{Command, Output};

use qroute::experiment::{
    build_router_circuit, tomography_circuits, PointConfig, RouterInputs, RouterSpec,
};
use qroute::experiment::{DeviceNoise, TOMOGRAPHY_REGISTER};
use qroute::simulator::{sample_shots, NoiseSpec};
use serde_json::Value;

fn qroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qroute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dump_ideal_has_quarter_on_000() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ideal.json");
    let run = qroute(&["dump-ideal", "--out", path_str(&out)]);
    assert!(run.status.success());
    let v = read_json(&out);
    assert_eq!(v["dim"], 8);
    assert!((v["real"][0][0].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["imag"][0][0].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn transpile_reports_equivalence_for_router() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("router.json");
    let lowered = dir.path().join("lowered.json");
    let circuit = build_router_circuit(&RouterSpec::ideal(RouterInputs::standard()), None).unwrap();
    std::fs::write(&input, circuit.to_json()).unwrap();

    let run = qroute(&[
        "transpile",
        "--in",
        path_str(&input),
        "--map",
        "jakarta",
        "--out",
        path_str(&lowered),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["equivalent"], true);
    assert!(report["max_deviation"].as_f64().unwrap() < 1e-9);
    assert!(report["cx_count"].as_u64().unwrap() >= 8);
    assert!(lowered.exists());
}

#[test]
fn calibrate_analytic_matrix() {
    let run = qroute(&[
        "calibrate",
        "--qubits",
        "2",
        "--p01",
        "0.02",
        "--p10",
        "0.02",
    ]);
    assert!(run.status.success());
    let v: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["n_qubits"], 2);
    let m = &v["matrix"];
    assert!((m[0][0].as_f64().unwrap() - 0.98 * 0.98).abs() < 1e-12);
    assert!((m[1][0].as_f64().unwrap() - 0.98 * 0.02).abs() < 1e-12);
    assert!((m[3][0].as_f64().unwrap() - 0.02 * 0.02).abs() < 1e-12);
}

#[test]
fn tomo_reconstructs_from_counts_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = PointConfig {
        spec: RouterSpec::ideal(RouterInputs::standard()),
        shots_per_setting: 20_000,
        base_seed: 1,
        noise: DeviceNoise::default(),
        mitigation: false,
        coupling_map: None,
    };
    let mut settings = serde_json::Map::new();
    for (i, (setting, circuit)) in tomography_circuits(&config).unwrap().iter().enumerate() {
        let rec = sample_shots(circuit, 20_000, &NoiseSpec::ideal(i as u64)).unwrap();
        let counts = serde_json::to_value(rec.counts(TOMOGRAPHY_REGISTER).unwrap()).unwrap();
        settings.insert(setting.to_string(), counts);
    }
    let input = dir.path().join("counts.json");
    let doc = serde_json::json!({"n_qubits": 3, "settings": settings});
    std::fs::write(&input, doc.to_string()).unwrap();

    let out = dir.path().join("rho.json");
    let run = qroute(&["tomo", "--in", path_str(&input), "--out", path_str(&out)]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let v = read_json(&out);
    for (i, j) in [(0, 0), (4, 4), (2, 2), (5, 5)] {
        let re = v["real"][i][j].as_f64().unwrap();
        assert!((re - 0.25).abs() < 0.02, "rho[{i}][{j}] = {re}");
    }
}

#[test]
fn sweep_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"gamma_grid": [0.5], "repetitions": 2}"#).unwrap();
    let out = dir.path().join("out");
    let run = qroute(&[
        "sweep",
        "--config",
        path_str(&config),
        "--out",
        path_str(&out),
        "--shots",
        "400",
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    for f in [
        "results.csv",
        "summary.csv",
        "manifest.json",
        "rho/ideal.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["shots_per_setting"], 400);
    assert_eq!(manifest["repetition_seeds"].as_array().unwrap().len(), 2);
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 3);
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"gamma_grid": [1.5]}"#).unwrap();
    let run = qroute(&["sweep", "--config", path_str(&bad)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("gamma_grid"));

    let run = qroute(&["tomo", "--in", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(run.status.code(), Some(1));

    assert_eq!(qroute(&["teleport"]).status.code(), Some(2));
    assert_eq!(qroute(&["--help"]).status.code(), Some(0));
}
