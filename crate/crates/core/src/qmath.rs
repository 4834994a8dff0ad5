//! Dense complex linear algebra: Kronecker products, partial traces, PSD
//! square roots and the Uhlmann fidelity.
//!
//! Matrices and vectors use big-endian qubit indexing: qubit 0 is the most
//! significant bit of a basis index, so `|q0 q1 … q(n-1)⟩` maps to the integer
//! whose binary expansion reads left to right. The single conversion to the
//! little-endian bitstrings seen at the measurement boundary lives in
//! [`crate::simulator::bits_to_bitstring`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Build a matrix from row-major nested arrays.
pub fn cmatrix<const R: usize, const C: usize>(rows: [[Complex64; C]; R]) -> CMatrix {
    CMatrix::from_fn(R, C, |i, j| rows[i][j])
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Number of qubits spanned by a `dim`-dimensional space, if `dim` is a power of two.
pub fn qubit_count(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

fn check_capacity(dim: usize) -> Result<()> {
    if dim > 1 << tolerance::MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "dimension {dim} exceeds the {}-qubit limit",
            tolerance::MAX_QUBITS
        )));
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = (a.nrows() * b.nrows(), a.ncols() * b.ncols());
    check_capacity(rows)?;
    check_capacity(cols)?;
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.nrows() {
                for l in 0..b.ncols() {
                    out[(i * b.nrows() + k, j * b.ncols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &CVector, b: &CVector) -> Result<CVector> {
    check_capacity(a.len() * b.len())?;
    Ok(CVector::from_fn(a.len() * b.len(), |idx, _| {
        a[idx / b.len()] * b[idx % b.len()]
    }))
}

/// Trace out every qubit not in `keep`. The kept qubits appear in ascending
/// index order in the result.
pub fn partial_trace(rho: &CMatrix, keep: &[usize], n: usize) -> Result<CMatrix> {
    if rho.nrows() != 1 << n || rho.ncols() != 1 << n {
        return Err(Error::arg(format!(
            "matrix is {}x{}, expected {n} qubits",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::arg("partial trace must keep at least one qubit"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::arg("duplicate qubit in keep set"));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::arg(format!("qubit {q} out of range for {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();

    // Scatter a k-bit kept index and an (n-k)-bit traced index into a full index.
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut full = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            if kept_bits >> (k - 1 - pos) & 1 == 1 {
                full |= 1 << (n - 1 - q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                full |= 1 << (n - 1 - q);
            }
        }
        full
    };

    let mut out = CMatrix::zeros(1 << k, 1 << k);
    for i in 0..1usize << k {
        for j in 0..1usize << k {
            let mut acc = ZERO;
            for t in 0..1usize << traced.len() {
                acc += rho[(compose(i, t), compose(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Apply a `2^k × 2^k` matrix to the listed qubits of an `n`-qubit amplitude
/// vector in place. `qubits[0]` is the most significant qubit of the matrix.
pub fn apply_local(amps: &mut [Complex64], n: usize, qubits: &[usize], m: &CMatrix) {
    match *qubits {
        [q] => return apply_one(amps, n - 1 - q, m),
        [a, b] => return apply_two(amps, [n - 1 - a, n - 1 - b], m),
        _ => {}
    }
    let k = qubits.len();
    let block = 1usize << k;
    debug_assert_eq!(amps.len(), 1 << n);
    debug_assert_eq!(m.nrows(), block);
    let shifts: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let mask = shifts.iter().fold(0usize, |acc, &s| acc | 1 << s);
    let offsets: Vec<usize> = (0..block)
        .map(|a| {
            shifts
                .iter()
                .enumerate()
                .filter(|(j, _)| a >> (k - 1 - j) & 1 == 1)
                .fold(0usize, |acc, (_, &s)| acc | 1 << s)
        })
        .collect();
    let mut gathered = vec![ZERO; block];
    for base in (0..amps.len()).filter(|b| b & mask == 0) {
        for (slot, &off) in gathered.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, g) in gathered.iter().enumerate() {
                acc += m[(row, col)] * g;
            }
            amps[base | off] = acc;
        }
    }
}

fn apply_one(amps: &mut [Complex64], shift: usize, m: &CMatrix) {
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let stride = 1usize << shift;
    for hi in (0..amps.len()).step_by(2 * stride) {
        for i0 in hi..hi + stride {
            let i1 = i0 + stride;
            let (x, y) = (amps[i0], amps[i1]);
            amps[i0] = m00 * x + m01 * y;
            amps[i1] = m10 * x + m11 * y;
        }
    }
}

fn apply_two(amps: &mut [Complex64], shifts: [usize; 2], m: &CMatrix) {
    let mut mm = [[ZERO; 4]; 4];
    for (r, row) in mm.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    let (a, b) = (1usize << shifts[0], 1usize << shifts[1]);
    let offsets = [0, b, a, a | b];
    let mask = a | b;
    for base in (0..amps.len()).filter(|i| i & mask == 0) {
        let g = offsets.map(|o| amps[base | o]);
        for (row, &o) in mm.iter().zip(&offsets) {
            amps[base | o] = row[0] * g[0] + row[1] * g[1] + row[2] * g[2] + row[3] * g[3];
        }
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(&(m.adjoint() * m), &identity(m.nrows())) < tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) < tol
}

/// Eigendecomposition of a Hermitian matrix, returning real eigenvalues and
/// the unitary whose columns are the eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !is_hermitian(m, tolerance::EXACT) {
        return Err(Error::arg("matrix is not Hermitian"));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Rebuild `V diag(f(λ)) V†` from an eigendecomposition.
pub fn from_eigen(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let s = f(v);
        scaled.column_mut(j).scale_mut(s);
    }
    scaled * vectors.adjoint()
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-NEGATIVE_EIGEN_FLOOR, 0)` are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    if let Some(&min) = values
        .iter()
        .find(|&&v| v < -tolerance::NEGATIVE_EIGEN_FLOOR)
    {
        return Err(Error::arg(format!(
            "matrix is not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(from_eigen(&values, &vectors, |v| v.max(0.0).sqrt()))
}

/// Uhlmann fidelity `(Tr √(√σ σ′ √σ))²`, clamped to `[0, 1]`.
pub fn fidelity(sigma: &CMatrix, sigma_prime: &CMatrix) -> Result<f64> {
    if sigma.shape() != sigma_prime.shape() || !sigma.is_square() {
        return Err(Error::arg(format!(
            "fidelity of {:?} and {:?} matrices",
            sigma.shape(),
            sigma_prime.shape()
        )));
    }
    let root = psd_sqrt(sigma)?;
    let inner = &root * sigma_prime * &root;
    // Products of PSD matrices lose exact Hermiticity to rounding.
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let (values, _) = hermitian_eigen(&inner)?;
    let trace: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((trace * trace).clamp(0.0, 1.0))
}

/// `|⟨u|v⟩|²` for normalized vectors.
pub fn state_overlap(u: &CVector, v: &CVector) -> f64 {
    u.dotc(v).norm_sqr()
}

/// Trace distance `½ Tr|a − b|` between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(&(a - b))?;
    Ok(0.5 * values.iter().map(|v| v.abs()).sum::<f64>())
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// A Hermitian, positive semidefinite, unit-trace matrix over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if qubit_count(matrix.nrows()).is_none() || !matrix.is_square() {
            return Err(Error::arg(format!(
                "density matrix must be 2^n square, got {:?}",
                matrix.shape()
            )));
        }
        if !is_hermitian(&matrix, tolerance::EXACT) {
            return Err(Error::arg("density matrix is not Hermitian"));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > tolerance::EXACT {
            return Err(Error::arg(format!("density matrix trace is {trace}")));
        }
        let (values, _) = hermitian_eigen(&matrix)?;
        if let Some(&v) = values
            .iter()
            .find(|&&v| v < -tolerance::NEGATIVE_EIGEN_FLOOR)
        {
            return Err(Error::arg(format!(
                "density matrix has negative eigenvalue {v:e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(state: &CVector) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > tolerance::EXACT {
            return Err(Error::arg(format!("state norm is {norm}")));
        }
        Ok(DensityMatrix {
            matrix: outer(state),
        })
    }

    /// The maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1 << n;
        DensityMatrix {
            matrix: identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        fidelity(&self.matrix, &other.matrix)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = partial_trace(&self.matrix, keep, self.n_qubits())?;
        Ok(DensityMatrix { matrix: reduced })
    }

    pub fn to_dump(&self) -> DensityMatrixDump {
        let dim = self.dim();
        DensityMatrixDump {
            dim,
            real: (0..dim)
                .map(|i| (0..dim).map(|j| self.matrix[(i, j)].re).collect())
                .collect(),
            imag: (0..dim)
                .map(|i| (0..dim).map(|j| self.matrix[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn from_dump(dump: &DensityMatrixDump) -> Result<Self> {
        let dim = dump.dim;
        if dump.real.len() != dim
            || dump.imag.len() != dim
            || dump.real.iter().chain(&dump.imag).any(|r| r.len() != dim)
        {
            return Err(Error::arg("density dump rows do not match `dim`"));
        }
        DensityMatrix::new(CMatrix::from_fn(dim, dim, |i, j| {
            c64(dump.real[i][j], dump.imag[i][j])
        }))
    }
}

/// JSON layout for density matrices: real and imaginary parts as separate
/// row-major grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixDump {
    pub dim: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CMatrix {
        cmatrix([[ZERO, ONE], [ONE, ZERO]])
    }

    fn ket(bits: &[u8]) -> CVector {
        let n = bits.len();
        let idx = bits.iter().fold(0, |acc, &b| acc << 1 | b as usize);
        let mut v = CVector::zeros(1 << n);
        v[idx] = ONE;
        v
    }

    #[test]
    fn identity_tensor_identity() {
        let out = tensor_product(&identity(2), &identity(2)).unwrap();
        assert_eq!(out, identity(4));
    }

    #[test]
    fn x_tensor_identity_hand_expanded() {
        let out = tensor_product(&x(), &identity(2)).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for (r, c) in [(2, 0), (3, 1), (0, 2), (1, 3)] {
            expected[(r, c)] = ONE;
        }
        assert_eq!(out, expected);
    }

    #[test]
    fn tensor_capacity() {
        let big = identity(1 << 7);
        assert!(matches!(
            tensor_product(&big, &big),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let rho = outer(&ket(&[0, 0]));
        let reduced = partial_trace(&rho, &[0], 2).unwrap();
        assert!(max_abs_diff(&reduced, &outer(&ket(&[0]))) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::from_vec(vec![c64(s, 0.0), ZERO, ZERO, c64(s, 0.0)]);
        let rho = outer(&bell);
        let half = identity(2).scale(0.5);
        for q in 0..2 {
            let reduced = partial_trace(&rho, &[q], 2).unwrap();
            assert!(max_abs_diff(&reduced, &half) < 1e-15);
        }
        assert!(max_abs_diff(&partial_trace(&rho, &[0, 1], 2).unwrap(), &rho) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_ascending_order() {
        // |0 1 1⟩ keeping {2, 0} gives |0 1⟩ over (q0, q2).
        let rho = outer(&ket(&[0, 1, 1]));
        let reduced = partial_trace(&rho, &[2, 0], 3).unwrap();
        assert!(max_abs_diff(&reduced, &outer(&ket(&[0, 1]))) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let rho = outer(&ket(&[0, 0]));
        assert!(matches!(
            partial_trace(&rho, &[], 2),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[2], 2),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn psd_sqrt_simple_cases() {
        assert!(max_abs_diff(&psd_sqrt(&identity(4)).unwrap(), &identity(4)) < 1e-12);
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(4.0, 0.0), ZERO]));
        let r = psd_sqrt(&m).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(2.0, 0.0), ZERO]));
        assert!(max_abs_diff(&r, &expected) < 1e-12);
    }

    #[test]
    fn psd_sqrt_clips_tiny_negative() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, c64(-5e-10, 0.0)]));
        let r = psd_sqrt(&m).unwrap();
        assert!(r[(1, 1)].norm() < 1e-15);
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, c64(-1e-6, 0.0)]));
        assert!(psd_sqrt(&bad).is_err());
    }

    #[test]
    fn psd_sqrt_rejects_non_hermitian() {
        let m = cmatrix([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(psd_sqrt(&m), Err(Error::Argument(_))));
    }

    #[test]
    fn fidelity_reference_values() {
        let zero = outer(&ket(&[0]));
        let one = outer(&ket(&[1]));
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        let mixed = identity(2).scale(0.5);
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&zero, &identity(4)).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        assert!(DensityMatrix::new(identity(2).scale(0.5)).is_ok());
        let not_psd = cmatrix([[c64(1.5, 0.0), ZERO], [ZERO, c64(-0.5, 0.0)]]);
        assert!(DensityMatrix::new(not_psd).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![c64(s, 0.0), c64(0.0, s)]);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let json = serde_json::to_string(&rho.to_dump()).unwrap();
        let back: DensityMatrixDump = serde_json::from_str(&json).unwrap();
        assert_eq!(DensityMatrix::from_dump(&back).unwrap(), rho);
    }
}
