//! Rewriting every library gate into the device basis {I, RZ, SX, X, CX}.

use std::f64::consts::FRAC_PI_4;

use super::euler::one_qubit_ops;
use super::kak::two_qubit_ops;
use crate::circuit::{Circuit, CircuitOp, GateKind};
use crate::error::{Error, Result};

fn cx(control: usize, target: usize) -> CircuitOp {
    CircuitOp::gate(GateKind::CX, [control, target])
}

fn rz(angle: f64, q: usize) -> CircuitOp {
    CircuitOp::gate(GateKind::RZ(angle), [q])
}

fn h(q: usize) -> Vec<CircuitOp> {
    one_qubit_ops(&GateKind::H.matrix().expect("H"), q)
}

/// Six-CX Toffoli with controls `c1`, `c2` and target `t`.
fn toffoli(c1: usize, c2: usize, t: usize) -> Vec<CircuitOp> {
    let mut out = h(t);
    out.push(cx(c2, t));
    out.push(rz(-FRAC_PI_4, t));
    out.push(cx(c1, t));
    out.push(rz(FRAC_PI_4, t));
    out.push(cx(c2, t));
    out.push(rz(-FRAC_PI_4, t));
    out.push(cx(c1, t));
    out.push(rz(FRAC_PI_4, c2));
    out.push(rz(FRAC_PI_4, t));
    out.extend(h(t));
    out.push(cx(c1, c2));
    out.push(rz(FRAC_PI_4, c1));
    out.push(rz(-FRAC_PI_4, c2));
    out.push(cx(c1, c2));
    out
}

/// Basis ops (time order) for one gate.
pub fn lower_gate(kind: &GateKind, qubits: &[usize]) -> Result<Vec<CircuitOp>> {
    Ok(match kind {
        k if k.is_basis() => vec![CircuitOp::gate(k.clone(), qubits.to_vec())],
        GateKind::T => vec![rz(FRAC_PI_4, qubits[0])],
        GateKind::SWAP => {
            let (a, b) = (qubits[0], qubits[1]);
            vec![cx(a, b), cx(b, a), cx(a, b)]
        }
        GateKind::CSWAP => {
            let (c, a, b) = (qubits[0], qubits[1], qubits[2]);
            let mut out = vec![cx(b, a)];
            out.extend(toffoli(c, a, b));
            out.push(cx(b, a));
            out
        }
        k => match qubits {
            [q] => one_qubit_ops(&k.matrix()?, *q),
            [a, b] => two_qubit_ops(&k.matrix()?, *a, *b)?,
            _ => {
                return Err(Error::UnsupportedGate(format!(
                    "no decomposition rule for {}-qubit {}",
                    qubits.len(),
                    k.name()
                )))
            }
        },
    })
}

/// Lower every gate to the basis; measurements and post-selections pass through.
pub fn decompose_to_basis(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits())?;
    for r in circuit.registers() {
        out.add_register(r.name.clone(), r.size)?;
    }
    for op in circuit.ops() {
        match op {
            CircuitOp::Gate { kind, qubits } => out.append_all(lower_gate(kind, qubits)?)?,
            other => out.append(other.clone())?,
        };
    }
    Ok(out)
}
