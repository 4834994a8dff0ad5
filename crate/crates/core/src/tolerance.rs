//! Numerical tolerances shared by every module.

/// Exact-arithmetic checks: unitarity, normalization, Hermiticity, trace.
pub const EXACT: f64 = 1e-10;

/// Quantities that pass through an eigendecomposition.
pub const EIGEN: f64 = 1e-9;

/// Eigenvalues above `-NEGATIVE_EIGEN_FLOOR` are treated as rounding noise and clipped.
pub const NEGATIVE_EIGEN_FLOOR: f64 = 1e-9;

/// Post-selection branches below this probability are impossible.
pub const IMPOSSIBLE_BRANCH: f64 = 1e-12;

/// Rotation angles below this are dropped when lowering to the device basis.
pub const ANGLE_ZERO: f64 = 1e-12;

/// Transpiled circuits must reproduce the original unitary within this bound.
pub const EQUIVALENCE: f64 = 1e-9;

/// Largest supported register width for dense simulation.
pub const MAX_QUBITS: usize = 12;

/// Largest state tomography supports (3^n settings, 4^n Pauli strings).
pub const MAX_TOMOGRAPHY_QUBITS: usize = 5;

/// Calibration matrices with a larger condition number are rejected.
pub const MAX_CALIBRATION_CONDITION: f64 = 1e6;
