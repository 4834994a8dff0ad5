//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of gates, terminal measurements and
//! post-selections over `n_qubits` qubits plus named classical registers.
//! Once a qubit has been measured or post-selected no later gate may touch
//! it; this keeps deferred and mid-circuit measurement equivalent and lets
//! the transpiler hoist such ops past routing.

mod gates;
mod json;

pub use gates::{gate_matrix, GateKind};
pub use json::{CircuitDoc, ClbitDoc, OpDoc, RegisterDoc};

use crate::error::{Error, Result};
use crate::qmath::{apply_local, identity, CMatrix};
use crate::tolerance;

/// Reference to one bit of a named classical register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clbit {
    pub register: String,
    pub index: usize,
}

impl Clbit {
    pub fn new(register: impl Into<String>, index: usize) -> Self {
        Clbit {
            register: register.into(),
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Gate {
        kind: GateKind,
        qubits: Vec<usize>,
    },
    /// Z-basis measurement recorded into `clbit`.
    Measure {
        qubit: usize,
        clbit: Clbit,
    },
    /// Z-basis measurement that keeps the run only when the outcome equals
    /// `outcome`. The outcome is optionally recorded into `clbit`.
    PostSelect {
        qubit: usize,
        outcome: u8,
        clbit: Option<Clbit>,
    },
}

impl CircuitOp {
    pub fn gate(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Self {
        CircuitOp::Gate {
            kind,
            qubits: qubits.into(),
        }
    }

    pub fn measure(qubit: usize, clbit: Clbit) -> Self {
        CircuitOp::Measure { qubit, clbit }
    }

    pub fn post_select(qubit: usize, outcome: u8, clbit: Option<Clbit>) -> Self {
        CircuitOp::PostSelect {
            qubit,
            outcome,
            clbit,
        }
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            CircuitOp::Gate { qubits, .. } => qubits,
            CircuitOp::Measure { qubit, .. } | CircuitOp::PostSelect { qubit, .. } => {
                std::slice::from_ref(qubit)
            }
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, CircuitOp::Gate { .. })
    }

    pub fn clbit(&self) -> Option<&Clbit> {
        match self {
            CircuitOp::Gate { .. } => None,
            CircuitOp::Measure { clbit, .. } => Some(clbit),
            CircuitOp::PostSelect { clbit, .. } => clbit.as_ref(),
        }
    }

    /// The same op with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> CircuitOp {
        match self {
            CircuitOp::Gate { kind, qubits } => CircuitOp::Gate {
                kind: kind.clone(),
                qubits: qubits.iter().map(|&q| map(q)).collect(),
            },
            CircuitOp::Measure { qubit, clbit } => CircuitOp::Measure {
                qubit: map(*qubit),
                clbit: clbit.clone(),
            },
            CircuitOp::PostSelect {
                qubit,
                outcome,
                clbit,
            } => CircuitOp::PostSelect {
                qubit: map(*qubit),
                outcome: *outcome,
                clbit: clbit.clone(),
            },
        }
    }
}

/// A sequence of ops meant to be appended to a larger circuit.
pub type Fragment = Vec<CircuitOp>;

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
    registers: Vec<Register>,
    /// Qubits that have been measured or post-selected.
    retired: Vec<bool>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > tolerance::MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "circuit width {n_qubits} outside 1..={}",
                tolerance::MAX_QUBITS
            )));
        }
        Ok(Circuit {
            n_qubits,
            ops: Vec::new(),
            registers: Vec::new(),
            retired: vec![false; n_qubits],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn add_register(&mut self, name: impl Into<String>, size: usize) -> Result<&mut Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::arg(format!("register `{name}` has size 0")));
        }
        match self.register(&name) {
            Some(r) if r.size == size => {}
            Some(r) => {
                return Err(Error::arg(format!(
                    "register `{name}` already declared with size {}",
                    r.size
                )))
            }
            None => self.registers.push(Register { name, size }),
        }
        Ok(self)
    }

    fn check(&self, op: &CircuitOp) -> std::result::Result<(), String> {
        let qubits = op.qubits();
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            ));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(format!("qubit {q} repeated"));
            }
        }
        if let Some(&q) = qubits.iter().find(|&&q| self.retired[q]) {
            return Err(format!("qubit {q} was already measured or post-selected"));
        }
        match op {
            CircuitOp::Gate { kind, qubits } => {
                if kind.arity() != qubits.len() {
                    return Err(format!(
                        "{} acts on {} qubits, got {}",
                        kind.name(),
                        kind.arity(),
                        qubits.len()
                    ));
                }
                kind.validate().map_err(|e| e.to_string())?;
            }
            CircuitOp::PostSelect { outcome, .. } if *outcome > 1 => {
                return Err(format!("post-selection outcome {outcome} is not 0 or 1"));
            }
            _ => {}
        }
        if let Some(clbit) = op.clbit() {
            match self.register(&clbit.register) {
                None => return Err(format!("unknown register `{}`", clbit.register)),
                Some(r) if clbit.index >= r.size => {
                    return Err(format!(
                        "bit {} out of range for register `{}` of size {}",
                        clbit.index, r.name, r.size
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn append(&mut self, op: CircuitOp) -> Result<&mut Self> {
        self.check(&op).map_err(|reason| Error::Build {
            position: self.ops.len(),
            reason,
        })?;
        if !op.is_gate() {
            self.retired[op.qubits()[0]] = true;
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn append_all(&mut self, ops: impl IntoIterator<Item = CircuitOp>) -> Result<&mut Self> {
        for op in ops {
            self.append(op)?;
        }
        Ok(self)
    }

    pub fn gate(&mut self, kind: GateKind, qubits: impl Into<Vec<usize>>) -> Result<&mut Self> {
        self.append(CircuitOp::gate(kind, qubits))
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::H, [q])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::X, [q])
    }

    pub fn t(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::T, [q])
    }

    pub fn rz(&mut self, angle: f64, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::RZ(angle), [q])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::CX, [control, target])
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) -> Result<&mut Self> {
        self.gate(GateKind::CSWAP, [control, a, b])
    }

    pub fn measure(&mut self, qubit: usize, register: &str, index: usize) -> Result<&mut Self> {
        self.append(CircuitOp::measure(qubit, Clbit::new(register, index)))
    }

    pub fn post_select(&mut self, qubit: usize, outcome: u8) -> Result<&mut Self> {
        self.append(CircuitOp::post_select(qubit, outcome, None))
    }

    /// Append every op and register of `other`, which must have the same width.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::arg(format!(
                "cannot join a {}-qubit circuit onto a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        for r in &other.registers {
            self.add_register(r.name.clone(), r.size)?;
        }
        self.append_all(other.ops.iter().cloned())
    }

    /// True when the circuit holds gates only.
    pub fn is_unitary_only(&self) -> bool {
        self.ops.iter().all(CircuitOp::is_gate)
    }

    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_gate()).count()
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, CircuitOp::Gate { kind, .. } if kind.name() == name))
            .count()
    }

    /// Longest chain of ops sharing qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for op in &self.ops {
            let next = op.qubits().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in op.qubits() {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// The inverse circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Result<Circuit> {
        if !self.is_unitary_only() {
            return Err(Error::Contract(
                "only unitary circuits can be inverted".into(),
            ));
        }
        let mut out = Circuit::new(self.n_qubits)?;
        for op in self.ops.iter().rev() {
            if let CircuitOp::Gate { kind, qubits } = op {
                out.gate(kind.inverse()?, qubits.clone())?;
            }
        }
        Ok(out)
    }
}

/// The `2^n × 2^n` unitary of a gate-only circuit.
pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix> {
    if !circuit.is_unitary_only() {
        return Err(Error::Contract(
            "circuit contains measurements or post-selections".into(),
        ));
    }
    let n = circuit.n_qubits();
    let dim = 1usize << n;
    let mut u = identity(dim);
    let matrices: Vec<(CMatrix, &[usize])> = circuit
        .ops()
        .iter()
        .map(|op| match op {
            CircuitOp::Gate { kind, qubits } => Ok((kind.matrix()?, qubits.as_slice())),
            _ => unreachable!(),
        })
        .collect::<Result<_>>()?;
    for j in 0..dim {
        let mut col = u.column(j).clone_owned();
        for (m, qubits) in &matrices {
            apply_local(col.as_mut_slice(), n, qubits, m);
        }
        u.set_column(j, &col);
    }
    Ok(u)
}
