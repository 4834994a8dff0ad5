macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(ideal_routing, "ideal_routing.rs");
example!(channel_correction, "channel_correction.rs");
example!(tomography, "tomography.rs");
example!(readout_mitigation, "readout_mitigation.rs");
example!(transpile_router, "transpile_router.rs");
example!(gamma_sweep, "gamma_sweep.rs");
example!(noisy_correction, "noisy_correction.rs");

#[test]
fn ideal_routing_example_runs() {
    let f = ideal_routing::run_example().unwrap();
    assert!((f - 1.0).abs() < 1e-10);
}

#[test]
fn channel_correction_example_runs() {
    for (gamma, sampled, theory) in channel_correction::run_example().unwrap() {
        assert!((sampled - theory).abs() < 0.02, "gamma {gamma}");
    }
}

#[test]
fn tomography_example_runs() {
    assert!(tomography::run_example().unwrap() > 0.97);
}

#[test]
fn readout_mitigation_example_runs() {
    let (raw, mitigated) = readout_mitigation::run_example().unwrap();
    assert!(mitigated < raw);
}

#[test]
fn transpile_router_example_runs() {
    let report = transpile_router::run_example().unwrap();
    assert!(report.equivalent);
}

#[test]
fn gamma_sweep_example_runs() {
    let report = gamma_sweep::run_example().unwrap();
    assert_eq!(report.rows.len(), 3);
}

#[test]
fn noisy_correction_example_runs() {
    let (with_ec, without_ec) = noisy_correction::run_example().unwrap();
    assert!(with_ec.is_finite() && without_ec.is_finite());
}
