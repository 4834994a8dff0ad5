//! Two-qubit lowering through the Cartan (KAK) decomposition.
//!
//! Any `U ∈ U(4)` factors as `(A₁ ⊗ B₁) · exp(i(a XX + b YY + c ZZ)) · (A₂ ⊗ B₂)`
//! up to global phase. In the magic basis local gates become real orthogonal
//! matrices and the canonical core becomes diagonal, so the factors come from
//! simultaneously diagonalizing the real and imaginary parts of `UᵀU` there.
//! The core is then emitted with three CX gates.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::euler::one_qubit_ops;
use crate::circuit::{CircuitOp, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{c64, cmatrix, CMatrix, I, ONE, ZERO};

/// Canonical coordinates and local factors of a two-qubit unitary.
#[derive(Debug, Clone)]
pub struct Kak {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Applied after the core: `A₁` on the first qubit, `B₁` on the second.
    pub after: (CMatrix, CMatrix),
    /// Applied before the core.
    pub before: (CMatrix, CMatrix),
}

fn magic_basis() -> CMatrix {
    let h = c64(FRAC_1_SQRT_2, 0.0);
    let ih = I * FRAC_1_SQRT_2;
    cmatrix([
        [h, ZERO, ZERO, ih],
        [ZERO, ih, h, ZERO],
        [ZERO, ih, -h, ZERO],
        [h, ZERO, ZERO, -ih],
    ])
}

fn pauli_pair(p: usize) -> CMatrix {
    let m = match p {
        0 => cmatrix([[ZERO, ONE], [ONE, ZERO]]),
        1 => cmatrix([[ZERO, -I], [I, ZERO]]),
        _ => cmatrix([[ONE, ZERO], [ZERO, -ONE]]),
    };
    m.kronecker(&m)
}

/// `exp(i(a XX + b YY + c ZZ))`.
pub fn canonical_gate(a: f64, b: f64, c: f64) -> CMatrix {
    let basis = magic_basis();
    let mut diag = [0.0f64; 4];
    for (coef, p) in [(a, 0), (b, 1), (c, 2)] {
        let d = basis.adjoint() * pauli_pair(p) * &basis;
        for (k, slot) in diag.iter_mut().enumerate() {
            *slot += coef * d[(k, k)].re;
        }
    }
    let phases = CMatrix::from_fn(4, 4, |i, j| if i == j { (I * diag[i]).exp() } else { ZERO });
    &basis * phases * basis.adjoint()
}

fn det2(m: &CMatrix) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Split a 4×4 matrix known to be `A ⊗ B` into its factors.
fn split_local(k: &CMatrix) -> (CMatrix, CMatrix) {
    let block = |i: usize, j: usize| k.view((2 * i, 2 * j), (2, 2)).clone_owned();
    let (bi, bj) = (0..4)
        .map(|n| (n / 2, n % 2))
        .max_by(|&(i, j), &(r, s)| block(i, j).norm().total_cmp(&block(r, s).norm()))
        .expect("four blocks");
    let pivot = block(bi, bj);
    let right = pivot.map(|z| z / det2(&pivot).sqrt());
    let left = CMatrix::from_fn(2, 2, |r, s| (right.adjoint() * block(r, s)).trace() / 2.0);
    (left, right)
}

/// Orthogonal `P` with `Pᵀ M P` diagonal, for a complex symmetric unitary `M`.
fn diagonalize_symmetric_unitary(m: &CMatrix) -> Result<DMatrix<f64>> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    // Re and Im commute, so a generic real combination shares their eigenbasis.
    const MIXES: [(f64, f64); 6] = [
        (1.0, 1.1),
        (0.57, -1.31),
        (1.73, 0.29),
        (-0.41, 2.09),
        (0.93, 0.77),
        (2.41, -0.17),
    ];
    for (x, y) in MIXES {
        let p = SymmetricEigen::new(&re * x + &im * y).eigenvectors;
        let pc = p.map(|v| c64(v, 0.0));
        let d = pc.transpose() * m * &pc;
        let off = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off < 1e-10 {
            return Ok(p);
        }
    }
    Err(Error::arg("failed to diagonalize two-qubit invariant"))
}

/// Cartan decomposition of a 4×4 unitary.
pub fn kak(u: &CMatrix) -> Result<Kak> {
    if u.shape() != (4, 4) {
        return Err(Error::arg("KAK needs a 4x4 unitary"));
    }
    let det = u.determinant();
    let su = u.map(|z| z / det.powf(0.25));
    let basis = magic_basis();
    let up = basis.adjoint() * &su * &basis;
    let m2 = up.transpose() * &up;

    let mut p = diagonalize_symmetric_unitary(&m2)?;
    if p.determinant() < 0.0 {
        p.column_mut(0).neg_mut();
    }
    let pc = p.map(|v| c64(v, 0.0));
    let d = pc.transpose() * &m2 * &pc;
    let mut theta: Vec<f64> = (0..4).map(|k| d[(k, k)].arg() / 2.0).collect();

    let left_orth = |theta: &[f64]| {
        let inv = CMatrix::from_fn(
            4,
            4,
            |i, j| {
                if i == j {
                    (-I * theta[i]).exp()
                } else {
                    ZERO
                }
            },
        );
        &up * &pc * inv
    };
    let mut k1 = left_orth(&theta);
    if k1.map(|z| z.re).determinant() < 0.0 {
        theta[0] += std::f64::consts::PI;
        k1 = left_orth(&theta);
    }

    let after = &basis * k1 * basis.adjoint();
    let before = &basis * pc.transpose() * basis.adjoint();

    let mut coords = [0.0f64; 3];
    for (slot, p) in coords.iter_mut().zip(0..3) {
        let diag = basis.adjoint() * pauli_pair(p) * &basis;
        *slot = (0..4).map(|k| theta[k] * diag[(k, k)].re).sum::<f64>() / 4.0;
    }

    Ok(Kak {
        a: coords[0],
        b: coords[1],
        c: coords[2],
        after: split_local(&after),
        before: split_local(&before),
    })
}

fn rz(angle: f64) -> CMatrix {
    GateKind::RZ(angle).matrix().expect("finite angle")
}

fn ry(angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    cmatrix([[c64(c, 0.0), c64(-s, 0.0)], [c64(s, 0.0), c64(c, 0.0)]])
}

/// Basis ops (time order) reproducing `u` on `(q0, q1)` up to global phase,
/// with at most three CX.
pub fn two_qubit_ops(u: &CMatrix, q0: usize, q1: usize) -> Result<Vec<CircuitOp>> {
    let k = kak(u)?;
    let (a1, b1) = &k.after;
    let (a2, b2) = &k.before;
    let mut out = Vec::new();

    if k.a.abs() < 1e-12 && k.b.abs() < 1e-12 && k.c.abs() < 1e-12 {
        out.extend(one_qubit_ops(&(a1 * a2), q0));
        out.extend(one_qubit_ops(&(b1 * b2), q1));
        return Ok(out);
    }

    // exp(i(aXX + bYY + cZZ)) =
    //   RZ(π/2)₀ · CX₁₀ · RY(t3)₁ · CX₀₁ · (RZ(t1)₀ ⊗ RY(t2)₁) · CX₁₀ · RZ(−π/2)₁
    let t1 = FRAC_PI_2 - 2.0 * k.c;
    let t2 = 2.0 * k.a - FRAC_PI_2;
    let t3 = FRAC_PI_2 - 2.0 * k.b;
    let cx = |c: usize, t: usize| CircuitOp::gate(GateKind::CX, [c, t]);

    out.extend(one_qubit_ops(a2, q0));
    out.extend(one_qubit_ops(&(rz(-FRAC_PI_2) * b2), q1));
    out.push(cx(q1, q0));
    out.extend(one_qubit_ops(&rz(t1), q0));
    out.extend(one_qubit_ops(&ry(t2), q1));
    out.push(cx(q0, q1));
    out.extend(one_qubit_ops(&ry(t3), q1));
    out.push(cx(q1, q0));
    out.extend(one_qubit_ops(&(a1 * rz(FRAC_PI_2)), q0));
    out.extend(one_qubit_ops(b1, q1));
    Ok(out)
}

/// Reconstruct `(A₁ ⊗ B₁) · core · (A₂ ⊗ B₂)` for checking.
pub fn recompose(k: &Kak) -> CMatrix {
    let after = k.after.0.kronecker(&k.after.1);
    let before = k.before.0.kronecker(&k.before.1);
    after * canonical_gate(k.a, k.b, k.c) * before
}
