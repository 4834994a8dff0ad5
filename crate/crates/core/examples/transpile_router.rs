// Lower the full error-corrected router to {I, RZ, SX, X, CX} on the
// seven-qubit H-shaped map and check it against the original.

use qroute::correction::ChannelParams;
use qroute::experiment::{build_router_circuit, RouterSpec, Variant};
use qroute::transpiler::{transpile_identity, CouplingMap, TranspileReport};

pub fn run_example() -> qroute::Result<TranspileReport> {
    let spec = RouterSpec::new(ChannelParams::new(0.6, 0.5)?, Variant::BothQubits, true)?;
    let circuit = build_router_circuit(&spec, None)?;
    let (result, report) = transpile_identity(&circuit, &CouplingMap::jakarta())?;
    println!(
        "{} gates -> {} basis gates ({} CX, {} SWAPs, depth {})",
        circuit.gate_count(),
        result.circuit.gate_count(),
        report.cx_count,
        report.swap_count,
        report.depth
    );
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report)
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
