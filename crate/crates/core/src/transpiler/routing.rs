//! Greedy SWAP insertion along shortest paths of a coupling map.

use serde::Serialize;

use super::coupling::CouplingMap;
use crate::circuit::{circuit_unitary, Circuit, CircuitOp, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{CMatrix, ZERO};
use crate::tolerance;

/// A circuit placed and routed on physical qubits.
#[derive(Debug, Clone)]
pub struct TranspileResult {
    /// Basis-only circuit over `n_physical` qubits.
    pub circuit: Circuit,
    /// `initial_layout[v]` = physical home of virtual qubit `v`. Entries past
    /// the logical width are the unused physical qubits in ascending order.
    pub initial_layout: Vec<usize>,
    /// Where each virtual qubit's content sits after the last gate.
    pub final_permutation: Vec<usize>,
    pub n_logical: usize,
    pub swap_count: usize,
    pub cx_count: usize,
    pub depth: usize,
}

impl TranspileResult {
    /// Trivial placement of a circuit on its own qubits.
    pub fn identity(circuit: &Circuit) -> Self {
        let n = circuit.n_qubits();
        TranspileResult {
            circuit: circuit.clone(),
            initial_layout: (0..n).collect(),
            final_permutation: (0..n).collect(),
            n_logical: n,
            swap_count: 0,
            cx_count: circuit.count_kind("CX"),
            depth: circuit.depth(),
        }
    }

    /// Final physical position of each logical qubit.
    pub fn logical_permutation(&self) -> &[usize] {
        &self.final_permutation[..self.n_logical]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub max_deviation: f64,
}

fn full_layout(layout: &[usize], n_physical: usize) -> Vec<usize> {
    let mut full = layout.to_vec();
    full.extend((0..n_physical).filter(|p| !layout.contains(p)));
    full
}

/// Route a basis-only circuit so every CX acts on a coupling-map edge.
///
/// Measurements and post-selections are moved after all gates (each acts on a
/// qubit no later gate touches) and remapped through the final layout.
pub fn route(
    circuit: &Circuit,
    map: &CouplingMap,
    initial_layout: &[usize],
) -> Result<TranspileResult> {
    let n_physical = map.n_physical();
    if circuit.n_qubits() > n_physical {
        return Err(Error::Capacity(format!(
            "{} logical qubits do not fit on {} physical qubits",
            circuit.n_qubits(),
            n_physical
        )));
    }
    if initial_layout.len() != circuit.n_qubits() {
        return Err(Error::arg(format!(
            "layout has {} entries for {} qubits",
            initial_layout.len(),
            circuit.n_qubits()
        )));
    }
    for (i, &p) in initial_layout.iter().enumerate() {
        if p >= n_physical || initial_layout[..i].contains(&p) {
            return Err(Error::arg(format!(
                "layout entry {p} is out of range or repeated"
            )));
        }
    }

    let initial = full_layout(initial_layout, n_physical);
    let mut phys = initial.clone();
    let mut virt = vec![0usize; n_physical];
    for (v, &p) in phys.iter().enumerate() {
        virt[p] = v;
    }

    let mut out = Circuit::new(n_physical)?;
    for r in circuit.registers() {
        out.add_register(r.name.clone(), r.size)?;
    }
    let mut deferred = Vec::new();
    let mut swap_count = 0;
    for op in circuit.ops() {
        let CircuitOp::Gate { kind, qubits } = op else {
            deferred.push(op);
            continue;
        };
        if !kind.is_basis() {
            return Err(Error::Contract(format!(
                "routing expects basis gates, found {}",
                kind.name()
            )));
        }
        if let [a, b] = qubits[..] {
            let path = map.shortest_path(phys[a], phys[b]);
            for hop in path.windows(2).take(path.len().saturating_sub(2)) {
                let (p, q) = (hop[0], hop[1]);
                out.append_all([
                    CircuitOp::gate(GateKind::CX, [p, q]),
                    CircuitOp::gate(GateKind::CX, [q, p]),
                    CircuitOp::gate(GateKind::CX, [p, q]),
                ])?;
                let (vp, vq) = (virt[p], virt[q]);
                virt.swap(p, q);
                phys[vp] = q;
                phys[vq] = p;
                swap_count += 1;
            }
        }
        out.append(op.remapped(|v| phys[v]))?;
    }
    for op in deferred {
        out.append(op.remapped(|v| phys[v]))?;
    }

    Ok(TranspileResult {
        cx_count: out.count_kind("CX"),
        depth: out.depth(),
        circuit: out,
        initial_layout: initial,
        final_permutation: phys,
        n_logical: circuit.n_qubits(),
        swap_count,
    })
}

/// Gates of `circuit` only, relabelled through `layout` onto `width` qubits.
fn placed_gates(circuit: &Circuit, width: usize, layout: &[usize]) -> Result<Circuit> {
    let mut out = Circuit::new(width)?;
    out.append_all(
        circuit
            .ops()
            .iter()
            .filter(|op| op.is_gate())
            .map(|op| op.remapped(|v| layout[v])),
    )?;
    Ok(out)
}

/// Strip global phase using the entry where `reference` is largest.
fn phase_normalized(m: &CMatrix, pivot: (usize, usize)) -> CMatrix {
    let z = m[pivot];
    if z.norm() == 0.0 {
        return m.clone();
    }
    let phase = z / z.norm();
    m.map(|x| x / phase)
}

/// Compare the gates of `original` against a routed result, up to global
/// phase and the recorded qubit movement. Measurements and post-selections are
/// ignored.
pub fn verify_equivalence(original: &Circuit, result: &TranspileResult) -> Result<Equivalence> {
    let width = result.circuit.n_qubits();
    if width > tolerance::MAX_QUBITS {
        return Err(Error::Capacity(format!("verification width {width}")));
    }
    let expected = circuit_unitary(&placed_gates(original, width, &result.initial_layout)?)?;
    let identity: Vec<usize> = (0..width).collect();
    let routed = circuit_unitary(&placed_gates(&result.circuit, width, &identity)?)?;

    // Move the content at final[v] back to initial[v].
    let dim = 1usize << width;
    let bit = |idx: usize, q: usize| idx >> (width - 1 - q) & 1;
    let target = |idx: usize| {
        (0..width).fold(0usize, |acc, v| {
            acc | bit(idx, result.final_permutation[v]) << (width - 1 - result.initial_layout[v])
        })
    };
    let mut undone = CMatrix::from_element(dim, dim, ZERO);
    for row in 0..dim {
        let dest = target(row);
        for col in 0..dim {
            undone[(dest, col)] = routed[(row, col)];
        }
    }

    let pivot = expected
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| (k % dim, k / dim))
        .expect("non-empty matrix");
    let a = phase_normalized(&expected, pivot);
    let b = phase_normalized(&undone, pivot);
    let max_deviation = crate::qmath::max_abs_diff(&a, &b);
    Ok(Equivalence {
        equivalent: max_deviation < tolerance::EQUIVALENCE,
        max_deviation,
    })
}
