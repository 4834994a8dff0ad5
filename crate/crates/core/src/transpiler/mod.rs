//! Lowering to the device basis and routing onto a coupling map.

pub mod coupling;
pub mod decompose;
pub mod euler;
pub mod kak;
pub mod routing;
#[cfg(test)]
pub(crate) mod testing;

use serde::Serialize;

pub use coupling::{CouplingMap, JAKARTA_EDGES};
pub use decompose::{decompose_to_basis, lower_gate};
pub use routing::{route, verify_equivalence, Equivalence, TranspileResult};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::qmath::{max_abs_diff, CMatrix};

/// Largest elementwise gap between `a` and `b` after removing the relative
/// global phase (taken at the largest entry of `b`).
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let (k, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    let (za, zb) = (
        a.iter().nth(k).copied().unwrap(),
        b.iter().nth(k).copied().unwrap(),
    );
    if za.norm() == 0.0 {
        return f64::INFINITY;
    }
    let phase = (zb / za) / (zb / za).norm();
    max_abs_diff(&a.map(|z| z * phase), b)
}

/// Report printed by the `transpile` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct TranspileReport {
    pub swap_count: usize,
    pub cx_count: usize,
    pub depth: usize,
    pub final_permutation: Vec<usize>,
    pub equivalent: bool,
    pub max_deviation: f64,
}

/// Decompose and route from `layout` without the equivalence check.
pub fn lower_and_route(
    circuit: &Circuit,
    map: &CouplingMap,
    layout: &[usize],
) -> Result<TranspileResult> {
    route(&decompose_to_basis(circuit)?, map, layout)
}

/// Lower and route with the identity layout.
pub fn lower_and_route_identity(circuit: &Circuit, map: &CouplingMap) -> Result<TranspileResult> {
    let layout: Vec<usize> = (0..circuit.n_qubits()).collect();
    lower_and_route(circuit, map, &layout)
}

/// Decompose, route from `layout`, and check the result.
pub fn transpile(
    circuit: &Circuit,
    map: &CouplingMap,
    layout: &[usize],
) -> Result<(TranspileResult, TranspileReport)> {
    let result = lower_and_route(circuit, map, layout)?;
    let eq = verify_equivalence(circuit, &result)?;
    let report = TranspileReport {
        swap_count: result.swap_count,
        cx_count: result.cx_count,
        depth: result.depth,
        final_permutation: result.logical_permutation().to_vec(),
        equivalent: eq.equivalent,
        max_deviation: eq.max_deviation,
    };
    Ok((result, report))
}

/// Transpile with the identity layout.
pub fn transpile_identity(
    circuit: &Circuit,
    map: &CouplingMap,
) -> Result<(TranspileResult, TranspileReport)> {
    let layout: Vec<usize> = (0..circuit.n_qubits()).collect();
    transpile(circuit, map, &layout)
}
