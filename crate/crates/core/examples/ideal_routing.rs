// Route a superposed control and a phased signal through the noiseless
// router and compare the three output qubits with the ideal entangled state.

use qroute::experiment::{build_router_circuit, ideal_output, run_exact, RouterInputs, RouterSpec};

pub fn run_example() -> qroute::Result<f64> {
    let spec = RouterSpec::ideal(RouterInputs::standard());
    let circuit = build_router_circuit(&spec, None)?;
    println!(
        "{} qubits, {} gates",
        circuit.n_qubits(),
        circuit.gate_count()
    );

    let ideal = ideal_output(&spec.inputs);
    for (idx, amp) in ideal.iter().enumerate().filter(|(_, a)| a.norm() > 1e-12) {
        println!("|{idx:03b}>  {:+.4} {:+.4}i", amp.re, amp.im);
    }
    let run = run_exact(&spec, None)?;
    println!("fidelity to the ideal output: {:.12}", run.fidelity);
    Ok(run.fidelity)
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
