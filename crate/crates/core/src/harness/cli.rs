//! `qroute` subcommands.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::{parse_config, ExperimentConfig, MapSpec};
use super::output::write_json;
use super::sweep::run_sweep;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::experiment::{ideal_density, RouterInputs, Variant};
use crate::simulator::ReadoutError;
use crate::tomography::{build_calibration, CalibrationMode, CountsFile};
use crate::transpiler::{transpile_identity, CouplingMap};

#[derive(Debug, Parser)]
#[command(
    name = "qroute",
    version,
    about = "Error-corrected quantum router toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the damping strength and write CSV/JSON results.
    Sweep(SweepArgs),
    /// Reconstruct a density matrix from a tomography counts file.
    Tomo {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower a circuit JSON to the device basis and report equivalence.
    Transpile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "jakarta")]
        map: String,
        /// Also write the transpiled circuit here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a readout calibration matrix.
    Calibrate {
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        #[arg(long, default_value_t = 0.0)]
        p01: f64,
        #[arg(long, default_value_t = 0.0)]
        p10: f64,
        /// Sample this many shots per basis state instead of the analytic product.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the ideal routed three-qubit density matrix.
    DumpIdeal {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    no_mitigation: bool,
    #[arg(long)]
    transpile: bool,
    #[arg(long)]
    map: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Resolve `--map`: a known name or a path to a coupling-map JSON file.
fn resolve_map(arg: &str) -> Result<CouplingMap> {
    if let Some(map) = CouplingMap::named(arg) {
        return Ok(map);
    }
    let path = Path::new(arg);
    if path.exists() {
        return Ok(serde_json::from_str(&read(path)?)?);
    }
    Err(Error::config(
        "map",
        format!("`{arg}` is neither a known map nor a file"),
    ))
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn sweep_config(args: SweepArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => parse_config(&read(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(shots) = args.shots {
        config.shots_per_setting = shots;
    }
    if let Some(v) = args.variant {
        config.variant = v.parse::<Variant>()?;
    }
    if args.no_mitigation {
        config.mitigation = false;
    }
    if args.transpile {
        config.transpile = true;
    }
    if let Some(m) = args.map {
        config.coupling_map = match CouplingMap::named(&m) {
            Some(_) => MapSpec::Named(m),
            None => MapSpec::Explicit(resolve_map(&m)?),
        };
    }
    config.validate()?;
    Ok(config)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Sweep(args) => {
            let config = sweep_config(args)?;
            let report = run_sweep(&config)?;
            for row in &report.rows {
                println!(
                    "gamma={:.3} F={:.4}±{:.4} P_est={:.4}±{:.4} P_theory={:.4}",
                    row.gamma,
                    row.mean_f,
                    row.two_sigma_f,
                    row.mean_p_est,
                    row.two_sigma_p,
                    row.p_theory
                );
            }
            println!("wrote {}", config.output_dir.display());
            Ok(())
        }
        Command::Tomo { input, out } => {
            let file: CountsFile = serde_json::from_str(&read(&input)?)?;
            emit(&file.reconstruct()?.to_dump(), out.as_deref())
        }
        Command::Transpile { input, map, out } => {
            let circuit = Circuit::from_json(&read(&input)?)?;
            let (result, report) = transpile_identity(&circuit, &resolve_map(&map)?)?;
            if let Some(path) = out {
                super::output::write_atomic(&path, result.circuit.to_json().as_bytes())?;
            }
            emit(&report, None)
        }
        Command::Calibrate {
            qubits,
            p01,
            p10,
            shots,
            seed,
            out,
        } => {
            let readout = vec![ReadoutError { p01, p10 }; qubits];
            let mode = match shots {
                Some(shots) => CalibrationMode::Measured { shots, seed },
                None => CalibrationMode::Analytic,
            };
            emit(&build_calibration(&readout, mode)?, out.as_deref())
        }
        Command::DumpIdeal { out } => emit(
            &ideal_density(&RouterInputs::standard()).to_dump(),
            out.as_deref(),
        ),
    }
}

/// Parse `argv` (including the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
