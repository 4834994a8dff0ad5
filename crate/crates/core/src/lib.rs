//! Simulation toolkit for an error-corrected quantum router.
//!
//! Two qubits (a control and a signal) are sent through a post-selected
//! damping channel, repaired by an ancilla-assisted post-selected correction,
//! and routed by a controlled swap. The crate covers every stage: exact
//! statevector execution, seeded shot sampling with synthetic device noise,
//! state tomography with readout mitigation, and lowering to the
//! {I, RZ, SX, X, CX} basis on a seven-qubit H-shaped coupling map.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod circuit;
pub mod correction;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod qmath;
pub mod simulator;
pub mod tolerance;
pub mod tomography;
pub mod transpiler;

pub use error::{Error, Result};
