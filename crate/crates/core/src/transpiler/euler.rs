//! Single-qubit lowering to `RZ · SX · RZ · SX · RZ`.
//!
//! A unitary is first written as `e^{iα} RZ(φ) RY(θ) RZ(λ)`; then
//! `RY(θ) ≅ RZ(π) · SX · RZ(θ + π) · SX` up to phase. When θ is a quarter
//! turn a single SX suffices, and when θ vanishes the outer rotations merge.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{CircuitOp, GateKind};
use crate::qmath::CMatrix;
use crate::tolerance::ANGLE_ZERO;

/// ZYZ angles `(θ, φ, λ)` of a 2×2 unitary, ignoring global phase.
pub fn zyz_angles(u: &CMatrix) -> (f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let su = u.map(|z| z / det.sqrt());
    let theta = 2.0 * su[(1, 0)].norm().atan2(su[(0, 0)].norm());
    let sum = 2.0 * su[(1, 1)].arg();
    let diff = 2.0 * su[(1, 0)].arg();
    (theta, (sum + diff) / 2.0, (sum - diff) / 2.0)
}

/// Wrap into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn push_rz(out: &mut Vec<CircuitOp>, angle: f64, q: usize) {
    let a = wrap_angle(angle);
    if a.abs() > ANGLE_ZERO {
        out.push(CircuitOp::gate(GateKind::RZ(a), [q]));
    }
}

/// Basis ops (in time order) reproducing `u` on qubit `q` up to global phase.
pub fn one_qubit_ops(u: &CMatrix, q: usize) -> Vec<CircuitOp> {
    let (theta, phi, lam) = zyz_angles(u);
    let mut out = Vec::with_capacity(5);
    if theta.abs() < ANGLE_ZERO {
        push_rz(&mut out, phi + lam, q);
    } else if (theta - FRAC_PI_2).abs() < ANGLE_ZERO {
        push_rz(&mut out, lam - FRAC_PI_2, q);
        out.push(CircuitOp::gate(GateKind::SX, [q]));
        push_rz(&mut out, phi + FRAC_PI_2, q);
    } else {
        push_rz(&mut out, lam, q);
        out.push(CircuitOp::gate(GateKind::SX, [q]));
        push_rz(&mut out, theta + PI, q);
        out.push(CircuitOp::gate(GateKind::SX, [q]));
        push_rz(&mut out, phi + PI, q);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, Circuit};
    use crate::transpiler::equal_up_to_phase;

    fn lower(u: &CMatrix) -> CMatrix {
        let mut c = Circuit::new(1).unwrap();
        c.append_all(one_qubit_ops(u, 0)).unwrap();
        assert!(c
            .ops()
            .iter()
            .all(|op| matches!(op, CircuitOp::Gate { kind, .. } if kind.is_basis())));
        circuit_unitary(&c).unwrap()
    }

    #[test]
    fn hadamard_is_rz_sx_rz() {
        let h = GateKind::H.matrix().unwrap();
        let ops = one_qubit_ops(&h, 0);
        let names: Vec<_> = ops
            .iter()
            .map(|op| match op {
                CircuitOp::Gate { kind, .. } => kind.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(
            names,
            vec![
                GateKind::RZ(FRAC_PI_2),
                GateKind::SX,
                GateKind::RZ(FRAC_PI_2)
            ]
        );
        assert!(equal_up_to_phase(&lower(&h), &h) < 1e-10);
    }

    #[test]
    fn named_gates_round_trip() {
        for kind in [
            GateKind::I,
            GateKind::X,
            GateKind::SX,
            GateKind::T,
            GateKind::RZ(-2.5),
            GateKind::HTheta(0.955),
            GateKind::HTheta(-3.0),
        ] {
            let m = kind.matrix().unwrap();
            assert!(equal_up_to_phase(&lower(&m), &m) < 1e-10, "{kind:?}");
        }
    }

    #[test]
    fn diagonal_collapses_to_one_rz() {
        let ops = one_qubit_ops(&GateKind::T.matrix().unwrap(), 0);
        assert_eq!(ops.len(), 1);
        assert!(one_qubit_ops(&GateKind::I.matrix().unwrap(), 0).is_empty());
    }
}
