use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{ensure_writable, write_atomic, write_json};
use crate::correction::ChannelParams;
use crate::error::{Error, Result};
use crate::experiment::{
    ideal_density, repetition_seed, run_point_with, tomography_circuits, ExperimentResult,
    PointConfig, RouterInputs, RouterSpec,
};
use crate::transpiler::CouplingMap;

pub const RESULTS_HEADER: &str = "gamma,rep,F,P_est,P_theory,p1_theory,shots_kept";
pub const SUMMARY_HEADER: &str =
    "gamma,mean_F,two_sigma_F,mean_P_est,two_sigma_P,P_theory,p1_theory,shots_kept_total";

/// Aggregate over the repetitions of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub gamma: f64,
    pub mean_f: f64,
    pub two_sigma_f: f64,
    pub mean_p_est: f64,
    pub two_sigma_p: f64,
    pub p_theory: f64,
    pub p1_theory: f64,
    pub shots_kept_total: u64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SummaryRow>,
    /// Grid-major, repetition-minor.
    pub results: Vec<ExperimentResult>,
}

/// Mean and twice the sample standard deviation.
pub fn mean_two_sigma(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 2.0 * var.sqrt())
}

fn point_config(
    config: &ExperimentConfig,
    gamma: f64,
    map: Option<&CouplingMap>,
) -> Result<PointConfig> {
    let params = ChannelParams::new(gamma, config.gamma_guess)?;
    Ok(PointConfig {
        spec: RouterSpec::new(params, config.variant, config.error_correction())?,
        shots_per_setting: config.shots_per_setting,
        base_seed: config.base_seed,
        noise: config.noise,
        mitigation: config.mitigation,
        coupling_map: map.cloned(),
    })
}

/// Run every grid point and repetition without touching the filesystem.
pub fn compute_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let map = if config.transpile {
        Some(config.coupling_map.resolve()?)
    } else {
        None
    };
    let points = config
        .gamma_grid
        .iter()
        .map(|&g| {
            let pc = point_config(config, g, map.as_ref())?;
            let circuits = tomography_circuits(&pc)?;
            Ok((pc, circuits))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..config.repetitions).map(move |r| (p, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, r)| run_point_with(&points[p].0, r, &points[p].1))
        .collect::<Result<Vec<_>>>()?;

    let rows = results
        .chunks(config.repetitions as usize)
        .map(|reps| {
            let f: Vec<f64> = reps.iter().map(|r| r.fidelity).collect();
            let p: Vec<f64> = reps.iter().map(|r| r.success_prob_estimate).collect();
            let (mean_f, two_sigma_f) = mean_two_sigma(&f);
            let (mean_p_est, two_sigma_p) = mean_two_sigma(&p);
            SummaryRow {
                gamma: reps[0].gamma,
                mean_f,
                two_sigma_f,
                mean_p_est,
                two_sigma_p,
                p_theory: reps[0].success_prob_theory,
                p1_theory: reps[0].p1_theory,
                shots_kept_total: reps.iter().map(|r| r.shots_kept).sum(),
            }
        })
        .collect();
    Ok(SweepReport { rows, results })
}

pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut s = format!("{RESULTS_HEADER}\n");
    for r in results {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.gamma,
            r.repetition_index,
            r.fidelity,
            r.success_prob_estimate,
            r.success_prob_theory,
            r.p1_theory,
            r.shots_kept
        );
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.gamma,
            r.mean_f,
            r.two_sigma_f,
            r.mean_p_est,
            r.two_sigma_p,
            r.p_theory,
            r.p1_theory,
            r.shots_kept_total
        );
    }
    s
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    repetition_seeds: Vec<u64>,
    coupling_map: Option<CouplingMap>,
    version: &'static str,
    wall_time_s: f64,
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var("QROUTE_THREADS") else {
        return Ok(None);
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::config(
            "QROUTE_THREADS",
            format!("`{value}` is not a positive integer"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Error::config("QROUTE_THREADS", e.to_string()))
}

/// File name of the density dump for one run.
pub fn rho_file_name(gamma: f64, rep: u64) -> String {
    format!("rho_gamma{gamma:.4}_rep{rep}.json")
}

/// Run the sweep and write `results.csv`, `summary.csv`, `rho/*.json` and
/// `manifest.json` under `config.output_dir`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let out: &Path = &config.output_dir;
    ensure_writable(out)?;
    let start = Instant::now();
    let report = match thread_pool()? {
        Some(pool) => pool.install(|| compute_sweep(config))?,
        None => compute_sweep(config)?,
    };

    write_atomic(
        &out.join("results.csv"),
        results_csv(&report.results).as_bytes(),
    )?;
    write_atomic(
        &out.join("summary.csv"),
        summary_csv(&report.rows).as_bytes(),
    )?;
    let rho_dir = out.join("rho");
    write_json(
        &rho_dir.join("ideal.json"),
        &ideal_density(&RouterInputs::standard()).to_dump(),
    )?;
    for r in &report.results {
        if let Some(rho) = &r.reconstructed {
            write_json(
                &rho_dir.join(rho_file_name(r.gamma, r.repetition_index)),
                &rho.to_dump(),
            )?;
        }
    }
    let manifest = Manifest {
        config,
        repetition_seeds: (0..config.repetitions)
            .map(|r| repetition_seed(config.base_seed, r))
            .collect(),
        coupling_map: if config.transpile {
            Some(config.coupling_map.resolve()?)
        } else {
            None
        },
        version: env!("CARGO_PKG_VERSION"),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(report)
}
