//! JSON form of a circuit: `{n_qubits, ops: [{kind, qubits, params}], registers}`.
//!
//! Custom gates carry their matrix in `params` as row-major `(re, im)` pairs.
//! Measurements and post-selections name their classical bit in an optional
//! `clbit` field; a post-selection's required outcome is `params[0]`.

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitOp, Clbit, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{c64, CMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub n_qubits: usize,
    pub ops: Vec<OpDoc>,
    #[serde(default)]
    pub registers: Vec<RegisterDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDoc {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<ClbitDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClbitDoc {
    pub register: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterDoc {
    pub name: String,
    pub size: usize,
}

impl From<&Clbit> for ClbitDoc {
    fn from(c: &Clbit) -> Self {
        ClbitDoc {
            register: c.register.clone(),
            index: c.index,
        }
    }
}

impl From<&ClbitDoc> for Clbit {
    fn from(c: &ClbitDoc) -> Self {
        Clbit::new(c.register.clone(), c.index)
    }
}

fn op_to_doc(op: &CircuitOp) -> OpDoc {
    match op {
        CircuitOp::Gate { kind, qubits } => OpDoc {
            kind: kind.name().to_string(),
            qubits: qubits.clone(),
            params: kind.params(),
            clbit: None,
        },
        CircuitOp::Measure { qubit, clbit } => OpDoc {
            kind: "measure".into(),
            qubits: vec![*qubit],
            params: Vec::new(),
            clbit: Some(clbit.into()),
        },
        CircuitOp::PostSelect {
            qubit,
            outcome,
            clbit,
        } => OpDoc {
            kind: "postselect".into(),
            qubits: vec![*qubit],
            params: vec![f64::from(*outcome)],
            clbit: clbit.as_ref().map(ClbitDoc::from),
        },
    }
}

fn doc_to_op(doc: &OpDoc, position: usize) -> Result<CircuitOp> {
    let bad = |reason: String| Error::Build { position, reason };
    let one_param = || -> Result<f64> {
        match doc.params.as_slice() {
            [p] => Ok(*p),
            other => Err(bad(format!(
                "{} takes exactly one parameter, got {}",
                doc.kind,
                other.len()
            ))),
        }
    };
    let single_qubit = || -> Result<usize> {
        match doc.qubits.as_slice() {
            [q] => Ok(*q),
            _ => Err(bad(format!("{} acts on exactly one qubit", doc.kind))),
        }
    };
    let kind = match doc.kind.as_str() {
        "I" => GateKind::I,
        "X" => GateKind::X,
        "SX" => GateKind::SX,
        "H" => GateKind::H,
        "T" => GateKind::T,
        "CX" => GateKind::CX,
        "CSWAP" => GateKind::CSWAP,
        "SWAP" => GateKind::SWAP,
        "RZ" => GateKind::RZ(one_param()?),
        "H_THETA" => GateKind::HTheta(one_param()?),
        "UG" => GateKind::UG(one_param()?),
        "custom" => {
            let dim = 1usize << doc.qubits.len();
            if doc.params.len() != 2 * dim * dim {
                return Err(bad(format!(
                    "custom gate on {} qubits needs {} params",
                    doc.qubits.len(),
                    2 * dim * dim
                )));
            }
            GateKind::Custom(CMatrix::from_fn(dim, dim, |i, j| {
                let k = 2 * (i * dim + j);
                c64(doc.params[k], doc.params[k + 1])
            }))
        }
        "measure" => {
            let clbit = doc
                .clbit
                .as_ref()
                .ok_or_else(|| bad("measure needs a clbit".into()))?;
            return Ok(CircuitOp::measure(single_qubit()?, clbit.into()));
        }
        "postselect" => {
            let outcome = match one_param()? {
                o if o == 0.0 => 0,
                o if o == 1.0 => 1,
                o => return Err(bad(format!("post-selection outcome {o} is not 0 or 1"))),
            };
            return Ok(CircuitOp::post_select(
                single_qubit()?,
                outcome,
                doc.clbit.as_ref().map(Clbit::from),
            ));
        }
        other => return Err(bad(format!("unknown gate kind `{other}`"))),
    };
    if !doc.params.is_empty() && kind.params().is_empty() {
        return Err(bad(format!("{} takes no parameters", doc.kind)));
    }
    Ok(CircuitOp::gate(kind, doc.qubits.clone()))
}

impl Circuit {
    pub fn to_doc(&self) -> CircuitDoc {
        CircuitDoc {
            n_qubits: self.n_qubits,
            ops: self.ops.iter().map(op_to_doc).collect(),
            registers: self
                .registers
                .iter()
                .map(|r| RegisterDoc {
                    name: r.name.clone(),
                    size: r.size,
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &CircuitDoc) -> Result<Circuit> {
        let mut c = Circuit::new(doc.n_qubits)?;
        for r in &doc.registers {
            c.add_register(r.name.clone(), r.size)?;
        }
        for (i, op) in doc.ops.iter().enumerate() {
            c.append(doc_to_op(op, i)?)?;
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("circuit docs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        Circuit::from_doc(&serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::identity;
    use proptest::prelude::*;

    fn op_strategy(n: usize) -> impl Strategy<Value = CircuitOp> {
        let angle = -10.0f64..10.0;
        prop_oneof![
            (0..n).prop_map(|q| CircuitOp::gate(GateKind::H, [q])),
            (0..n).prop_map(|q| CircuitOp::gate(GateKind::SX, [q])),
            (0..n, angle.clone()).prop_map(|(q, a)| CircuitOp::gate(GateKind::RZ(a), [q])),
            (0..n, angle).prop_map(|(q, a)| CircuitOp::gate(GateKind::HTheta(a), [q])),
            (0..n, 1..n, 0.0f64..=1.0)
                .prop_map(move |(a, d, g)| { CircuitOp::gate(GateKind::UG(g), [a, (a + d) % n]) }),
            (0..n, 1..n).prop_map(move |(a, d)| CircuitOp::gate(GateKind::CX, [a, (a + d) % n])),
        ]
    }

    proptest! {
        #[test]
        fn json_round_trip(ops in proptest::collection::vec(op_strategy(4), 0..20)) {
            let mut c = Circuit::new(4).unwrap();
            c.add_register("c0", 2).unwrap();
            c.append_all(ops).unwrap();
            c.gate(GateKind::Custom(identity(2)), [0]).unwrap();
            c.measure(0, "c0", 1).unwrap();
            c.append(CircuitOp::post_select(1, 1, None)).unwrap();
            let text = c.to_json();
            let back = Circuit::from_json(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rejects_unknown_kind_and_fields() {
        let doc = r#"{"n_qubits":1,"ops":[{"kind":"Q","qubits":[0]}]}"#;
        assert!(matches!(
            Circuit::from_json(doc),
            Err(Error::Build { position: 0, .. })
        ));
        let doc = r#"{"n_qubits":1,"ops":[],"extra":1}"#;
        assert!(Circuit::from_json(doc).is_err());
        let doc = r#"{"n_qubits":1,"ops":[{"kind":"H","qubits":[0],"params":[1.0]}]}"#;
        assert!(Circuit::from_json(doc).is_err());
    }
}
