// A small damping-strength sweep that writes the CSV and JSON outputs.

use qroute::harness::{parse_config, run_sweep, SweepReport};

pub fn run_example() -> qroute::Result<SweepReport> {
    let out = std::env::temp_dir().join("qroute-gamma-sweep");
    let config = parse_config(&format!(
        r#"{{"gamma_grid":[0.0,0.5,0.9],"shots_per_setting":4000,"repetitions":3,
            "mitigation":false,"output_dir":{:?}}}"#,
        out.display().to_string()
    ))?;
    let report = run_sweep(&config)?;
    println!("gamma  mean_F   2σ_F    mean_P   P_theory");
    for r in &report.rows {
        println!(
            "{:.1}    {:.4}  {:.4}  {:.4}   {:.4}",
            r.gamma, r.mean_f, r.two_sigma_f, r.mean_p_est, r.p_theory
        );
    }
    println!("files in {}", out.display());
    Ok(report)
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
