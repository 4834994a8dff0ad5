//! Gate library. Every kind maps to an exact unitary over `2^arity`
//! dimensions, rows and columns ordered big-endian over the op's qubit list.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::qmath::{c64, cmatrix, identity, is_unitary, qubit_count, CMatrix, I, ONE, ZERO};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    X,
    /// √X.
    SX,
    /// `diag(e^{-iλ/2}, e^{iλ/2})`.
    RZ(f64),
    H,
    /// `diag(1, e^{iπ/4})`.
    T,
    /// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]` used to prepare the
    /// correction ancilla.
    HTheta(f64),
    /// Channel unitary coupling a system qubit (first) to an environment qubit
    /// (second) with damping strength γ ∈ [0, 1].
    UG(f64),
    /// Control first, target second.
    CX,
    /// Control first; the remaining two qubits are exchanged when it is |1⟩.
    CSWAP,
    SWAP,
    Custom(CMatrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::SX => "SX",
            GateKind::RZ(_) => "RZ",
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::HTheta(_) => "H_THETA",
            GateKind::UG(_) => "UG",
            GateKind::CX => "CX",
            GateKind::CSWAP => "CSWAP",
            GateKind::SWAP => "SWAP",
            GateKind::Custom(_) => "custom",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::I
            | GateKind::X
            | GateKind::SX
            | GateKind::RZ(_)
            | GateKind::H
            | GateKind::T
            | GateKind::HTheta(_) => 1,
            GateKind::UG(_) | GateKind::CX | GateKind::SWAP => 2,
            GateKind::CSWAP => 3,
            GateKind::Custom(m) => qubit_count(m.nrows()).unwrap_or(0),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            GateKind::RZ(p) | GateKind::HTheta(p) | GateKind::UG(p) => vec![*p],
            GateKind::Custom(m) => {
                let mut out = Vec::with_capacity(2 * m.len());
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        out.push(m[(i, j)].re);
                        out.push(m[(i, j)].im);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// The device basis {I, RZ, SX, X, CX}.
    pub fn is_basis(&self) -> bool {
        matches!(
            self,
            GateKind::I | GateKind::RZ(_) | GateKind::SX | GateKind::X | GateKind::CX
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GateKind::UG(g) if !(0.0..=1.0).contains(g) => {
                Err(Error::arg(format!("UG damping {g} outside [0, 1]")))
            }
            GateKind::RZ(p) | GateKind::HTheta(p) | GateKind::UG(p) if !p.is_finite() => Err(
                Error::arg(format!("{} parameter must be finite", self.name())),
            ),
            GateKind::Custom(m) => {
                if !m.is_square() || qubit_count(m.nrows()).is_none_or(|k| k == 0) {
                    return Err(Error::arg(format!(
                        "custom gate matrix has shape {:?}",
                        m.shape()
                    )));
                }
                if !is_unitary(m, tolerance::EXACT) {
                    return Err(Error::arg("custom gate matrix is not unitary"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        gate_matrix(self)
    }

    /// The inverse gate, staying inside named kinds where one exists.
    pub fn inverse(&self) -> Result<GateKind> {
        Ok(match self {
            GateKind::RZ(l) => GateKind::RZ(-l),
            GateKind::HTheta(t) => GateKind::HTheta(-t),
            GateKind::SX | GateKind::T | GateKind::UG(_) | GateKind::Custom(_) => {
                GateKind::Custom(self.matrix()?.adjoint())
            }
            other => other.clone(),
        })
    }
}

pub fn gate_matrix(kind: &GateKind) -> Result<CMatrix> {
    kind.validate()?;
    let h = FRAC_1_SQRT_2;
    Ok(match kind {
        GateKind::I => identity(2),
        GateKind::X => cmatrix([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::SX => cmatrix([
            [c64(0.5, 0.5), c64(0.5, -0.5)],
            [c64(0.5, -0.5), c64(0.5, 0.5)],
        ]),
        GateKind::RZ(l) => cmatrix([
            [(-I * (l / 2.0)).exp(), ZERO],
            [ZERO, (I * (l / 2.0)).exp()],
        ]),
        GateKind::H => cmatrix([[c64(h, 0.0), c64(h, 0.0)], [c64(h, 0.0), c64(-h, 0.0)]]),
        GateKind::T => cmatrix([[ONE, ZERO], [ZERO, (I * FRAC_PI_4).exp()]]),
        GateKind::HTheta(t) => {
            let (s, c) = t.sin_cos();
            cmatrix([[c64(c, 0.0), c64(-s, 0.0)], [c64(s, 0.0), c64(c, 0.0)]])
        }
        GateKind::UG(g) => {
            let keep = c64((1.0 - g).sqrt(), 0.0);
            let leak = c64(g.sqrt(), 0.0);
            cmatrix([
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, keep, leak, ZERO],
                [ZERO, -leak, keep, ZERO],
                [ZERO, ZERO, ZERO, ONE],
            ])
        }
        GateKind::CX => permutation(4, |i| if i >= 2 { i ^ 1 } else { i }),
        GateKind::SWAP => permutation(4, |i| (i & 1) << 1 | i >> 1),
        GateKind::CSWAP => permutation(8, |i| {
            if i & 0b100 != 0 {
                0b100 | (i & 1) << 1 | (i >> 1 & 1)
            } else {
                i
            }
        }),
        GateKind::Custom(m) => m.clone(),
    })
}

/// Permutation matrix sending basis state `|i⟩` to `|f(i)⟩`.
fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(f(i), i)] = ONE;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::max_abs_diff;

    fn all_kinds() -> Vec<GateKind> {
        vec![
            GateKind::I,
            GateKind::X,
            GateKind::SX,
            GateKind::RZ(0.37),
            GateKind::H,
            GateKind::T,
            GateKind::HTheta(1.1),
            GateKind::UG(0.0),
            GateKind::UG(0.42),
            GateKind::UG(1.0),
            GateKind::CX,
            GateKind::CSWAP,
            GateKind::SWAP,
        ]
    }

    #[test]
    fn every_kind_is_unitary() {
        for kind in all_kinds() {
            let m = kind.matrix().unwrap();
            assert_eq!(m.nrows(), 1 << kind.arity(), "{}", kind.name());
            assert!(is_unitary(&m, tolerance::EXACT), "{}", kind.name());
        }
    }

    #[test]
    fn ug_endpoints() {
        assert_eq!(GateKind::UG(0.0).matrix().unwrap(), identity(4));
        let expected = cmatrix([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, -ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]);
        assert_eq!(GateKind::UG(1.0).matrix().unwrap(), expected);
        assert!(matches!(
            GateKind::UG(1.2).matrix(),
            Err(Error::Argument(_))
        ));
        assert!(GateKind::UG(-0.1).matrix().is_err());
    }

    #[test]
    fn h_theta_quarter_turn() {
        let h = FRAC_1_SQRT_2;
        let expected = cmatrix([[c64(h, 0.0), c64(-h, 0.0)], [c64(h, 0.0), c64(h, 0.0)]]);
        let m = GateKind::HTheta(FRAC_PI_4).matrix().unwrap();
        assert!(max_abs_diff(&m, &expected) < 1e-15);
    }

    #[test]
    fn h_theta_inverse_pair() {
        for t in [-2.0, -0.3, 0.0, 0.955, 3.0] {
            let p = GateKind::HTheta(t).matrix().unwrap() * GateKind::HTheta(-t).matrix().unwrap();
            assert!(max_abs_diff(&p, &identity(2)) < 1e-12);
        }
    }

    #[test]
    fn cswap_exhaustive() {
        let m = GateKind::CSWAP.matrix().unwrap();
        for c in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let input = c << 2 | a << 1 | b;
                    let output = if c == 1 { c << 2 | b << 1 | a } else { input };
                    for row in 0..8 {
                        let expected = if row == output { ONE } else { ZERO };
                        assert_eq!(m[(row, input)], expected);
                    }
                }
            }
        }
    }

    #[test]
    fn cx_matches_control_first() {
        // |10⟩ → |11⟩
        let m = GateKind::CX.matrix().unwrap();
        assert_eq!(m[(3, 2)], ONE);
        assert_eq!(m[(0, 0)], ONE);
    }

    #[test]
    fn sx_squares_to_x() {
        let sx = GateKind::SX.matrix().unwrap();
        assert!(max_abs_diff(&(&sx * &sx), &GateKind::X.matrix().unwrap()) < 1e-15);
    }

    #[test]
    fn custom_validation() {
        assert!(GateKind::Custom(identity(3)).validate().is_err());
        assert!(GateKind::Custom(identity(2).scale(2.0)).validate().is_err());
        assert!(GateKind::Custom(identity(4)).validate().is_ok());
    }
}
