//! Pauli-basis state tomography and readout-error mitigation.
//!
//! Outcome integers follow the register convention: bit `k` of an outcome is
//! the result for tomography qubit `k`, which is character `len - 1 - k` of the
//! printed bitstring.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitOp, Clbit, Fragment, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{c64, cmatrix, hermitian_eigen, CMatrix, DensityMatrix, I, ONE, ZERO};
use crate::simulator::{bitstring_value, sample_shots, NoiseSpec, ReadoutError};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }
}

/// One measurement basis per tomography qubit; index 0 is the first qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TomographySetting(pub Vec<Basis>);

impl TomographySetting {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn parse(label: &str) -> Result<Self> {
        label
            .chars()
            .map(|c| match c {
                'X' => Ok(Basis::X),
                'Y' => Ok(Basis::Y),
                'Z' => Ok(Basis::Z),
                other => Err(Error::arg(format!("unknown basis letter `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(TomographySetting)
    }
}

impl fmt::Display for TomographySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{}", b.letter()))
    }
}

/// All `3ⁿ` settings, lexicographic with X < Y < Z and qubit 0 leading.
pub fn settings(n: usize) -> Result<Vec<TomographySetting>> {
    check_width(n)?;
    Ok((0..3usize.pow(n as u32))
        .map(|mut code| {
            let mut bases = vec![Basis::X; n];
            for slot in bases.iter_mut().rev() {
                *slot = [Basis::X, Basis::Y, Basis::Z][code % 3];
                code /= 3;
            }
            TomographySetting(bases)
        })
        .collect())
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > tolerance::MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Capacity(format!(
            "tomography on {n} qubits (supported 1..={})",
            tolerance::MAX_TOMOGRAPHY_QUBITS
        )));
    }
    Ok(())
}

/// Basis change and measurement of `qubits[k]` into `register[k]`.
pub fn measurement_rotation(
    setting: &TomographySetting,
    qubits: &[usize],
    register: &str,
) -> Fragment {
    let mut ops = Vec::new();
    for (&basis, &q) in setting.0.iter().zip(qubits) {
        match basis {
            Basis::X => ops.push(CircuitOp::gate(GateKind::H, [q])),
            Basis::Y => {
                ops.push(CircuitOp::gate(GateKind::RZ(-FRAC_PI_2), [q]));
                ops.push(CircuitOp::gate(GateKind::H, [q]));
            }
            Basis::Z => {}
        }
    }
    for (k, &q) in qubits.iter().enumerate().take(setting.n_qubits()) {
        ops.push(CircuitOp::measure(q, Clbit::new(register, k)));
    }
    ops
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => cmatrix([[ONE, ZERO], [ZERO, ONE]]),
            Pauli::X => cmatrix([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => cmatrix([[ZERO, -I], [I, ZERO]]),
            Pauli::Z => cmatrix([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }
}

/// All `4ⁿ` Pauli strings, qubit 0 leading, I < X < Y < Z.
pub fn pauli_strings(n: usize) -> Vec<Vec<Pauli>> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            let mut s = vec![Pauli::I; n];
            for slot in s.iter_mut().rev() {
                *slot = Pauli::ALL[code % 4];
                code /= 4;
            }
            s
        })
        .collect()
}

pub fn pauli_string_matrix(s: &[Pauli]) -> CMatrix {
    s.iter()
        .fold(CMatrix::identity(1, 1), |acc, p| acc.kronecker(&p.matrix()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliExpectation {
    pub pauli: Vec<Pauli>,
    pub value: f64,
}

/// Outcome distribution observed for one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingData {
    pub setting: TomographySetting,
    /// Indexed by outcome integer.
    pub probs: Vec<f64>,
}

impl SettingData {
    pub fn from_counts(setting: TomographySetting, counts: &BTreeMap<String, u64>) -> Result<Self> {
        let n = setting.n_qubits();
        let mut probs = vec![0.0; 1 << n];
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::IncompleteData(format!(
                "setting {setting} has no kept shots"
            )));
        }
        for (bits, &c) in counts {
            if bits.len() != n {
                return Err(Error::arg(format!(
                    "bitstring `{bits}` does not have {n} bits"
                )));
            }
            probs[bitstring_value(bits)?] += c as f64 / total as f64;
        }
        Ok(SettingData { setting, probs })
    }
}

/// Born probabilities of each outcome when measuring `rho` in `setting`.
pub fn exact_setting_probs(rho: &CMatrix, setting: &TomographySetting) -> Result<Vec<f64>> {
    let n = setting.n_qubits();
    let mut c = Circuit::new(n)?;
    for (q, b) in setting.0.iter().enumerate() {
        match b {
            Basis::X => {
                c.h(q)?;
            }
            Basis::Y => {
                c.rz(-FRAC_PI_2, q)?.h(q)?;
            }
            Basis::Z => {}
        }
    }
    let u = crate::circuit::circuit_unitary(&c)?;
    let rotated = &u * rho * u.adjoint();
    let mut probs = vec![0.0; 1 << n];
    for idx in 0..(1usize << n) {
        // Statevector index has qubit 0 as its top bit; outcome bit k is qubit k.
        let outcome = (0..n).fold(0, |acc, k| acc | (idx >> (n - 1 - k) & 1) << k);
        probs[outcome] = rotated[(idx, idx)].re;
    }
    Ok(probs)
}

/// Estimate every Pauli expectation by averaging over compatible settings.
pub fn expectations_from_data(n: usize, data: &[SettingData]) -> Result<Vec<PauliExpectation>> {
    check_width(n)?;
    let mut by_setting: BTreeMap<&TomographySetting, &[f64]> = BTreeMap::new();
    for d in data {
        if d.setting.n_qubits() != n || d.probs.len() != 1 << n {
            return Err(Error::arg(format!(
                "setting {} does not match {n} qubits",
                d.setting
            )));
        }
        by_setting.insert(&d.setting, &d.probs);
    }
    let all = settings(n)?;
    if let Some(missing) = all.iter().find(|s| !by_setting.contains_key(s)) {
        return Err(Error::IncompleteData(format!(
            "no data for setting {missing}"
        )));
    }

    Ok(pauli_strings(n)
        .into_iter()
        .map(|pauli| {
            let support: Vec<usize> = (0..n).filter(|&k| pauli[k] != Pauli::I).collect();
            if support.is_empty() {
                return PauliExpectation { pauli, value: 1.0 };
            }
            let mask = support.iter().fold(0usize, |m, &k| m | 1 << k);
            let compatible = all
                .iter()
                .filter(|s| support.iter().all(|&k| pauli[k].basis() == Some(s.0[k])));
            let (mut sum, mut count) = (0.0, 0usize);
            for s in compatible {
                sum += by_setting[s]
                    .iter()
                    .enumerate()
                    .map(|(o, p)| {
                        if (o & mask).count_ones() % 2 == 0 {
                            *p
                        } else {
                            -*p
                        }
                    })
                    .sum::<f64>();
                count += 1;
            }
            PauliExpectation {
                pauli,
                value: sum / count as f64,
            }
        })
        .collect())
}

/// Same as [`expectations_from_data`] starting from raw register counts keyed
/// by setting.
pub fn expectations_from_counts(
    n: usize,
    counts: &BTreeMap<TomographySetting, BTreeMap<String, u64>>,
) -> Result<Vec<PauliExpectation>> {
    let data = counts
        .iter()
        .map(|(s, c)| SettingData::from_counts(s.clone(), c))
        .collect::<Result<Vec<_>>>()?;
    expectations_from_data(n, &data)
}

/// `Tr(ρ P)` for every Pauli string.
pub fn exact_expectations(rho: &CMatrix) -> Result<Vec<PauliExpectation>> {
    let n = crate::qmath::qubit_count(rho.nrows())
        .ok_or_else(|| Error::arg("density matrix dimension is not a power of two"))?;
    check_width(n)?;
    Ok(pauli_strings(n)
        .into_iter()
        .map(|pauli| {
            let value = (rho * pauli_string_matrix(&pauli)).trace().re;
            PauliExpectation { pauli, value }
        })
        .collect())
}

/// Linear inversion followed by projection onto the PSD cone.
pub fn reconstruct(n: usize, expectations: &[PauliExpectation]) -> Result<DensityMatrix> {
    check_width(n)?;
    let dim = 1usize << n;
    let strings = pauli_strings(n);
    let mut raw = CMatrix::from_element(dim, dim, ZERO);
    for s in &strings {
        let e = expectations
            .iter()
            .find(|e| &e.pauli == s)
            .ok_or_else(|| Error::IncompleteData(format!("no expectation for {s:?}")))?;
        raw += pauli_string_matrix(s) * c64(e.value, 0.0);
    }
    raw /= c64(dim as f64, 0.0);
    let raw = (&raw + raw.adjoint()) * c64(0.5, 0.0);
    let (values, vectors) = hermitian_eigen(&raw)?;
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let rho = if total > 0.0 {
        crate::qmath::from_eigen(&clipped, &vectors, |v| v / total)
    } else {
        DensityMatrix::maximally_mixed(n).into_matrix()
    };
    DensityMatrix::new(rho)
}

/// Column-stochastic confusion matrix, `matrix[(i, j)] = P(read i | prepared j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CalibrationDoc", into = "CalibrationDoc")]
pub struct CalibrationMatrix {
    n_qubits: usize,
    matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationDoc {
    n_qubits: usize,
    matrix: Vec<Vec<f64>>,
}

impl From<CalibrationMatrix> for CalibrationDoc {
    fn from(c: CalibrationMatrix) -> Self {
        CalibrationDoc {
            n_qubits: c.n_qubits,
            matrix: c
                .matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<CalibrationDoc> for CalibrationMatrix {
    type Error = Error;

    fn try_from(doc: CalibrationDoc) -> Result<Self> {
        let dim = 1usize << doc.n_qubits;
        if doc.matrix.len() != dim || doc.matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::arg(format!(
                "calibration matrix must be {dim}x{dim}"
            )));
        }
        CalibrationMatrix::new(
            doc.n_qubits,
            DMatrix::from_fn(dim, dim, |i, j| doc.matrix[i][j]),
        )
    }
}

impl CalibrationMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<f64>) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.shape() != (dim, dim) {
            return Err(Error::arg(format!(
                "calibration matrix must be {dim}x{dim}"
            )));
        }
        if matrix.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::arg("calibration entries must be non-negative"));
        }
        for (j, col) in matrix.column_iter().enumerate() {
            if (col.sum() - 1.0).abs() > tolerance::EXACT {
                return Err(Error::arg(format!(
                    "calibration column {j} does not sum to 1"
                )));
            }
        }
        Ok(CalibrationMatrix { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, DMatrix::identity(1 << n_qubits, 1 << n_qubits))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ratio of largest to smallest singular value.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `M · p` for a distribution over outcome integers.
    pub fn apply(&self, probs: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(probs))
            .iter()
            .copied()
            .collect()
    }
}

/// 2×2 confusion matrix of one qubit.
pub fn confusion(e: ReadoutError) -> [[f64; 2]; 2] {
    [[1.0 - e.p01, e.p10], [e.p01, 1.0 - e.p10]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    /// Product of per-qubit confusion matrices.
    Analytic,
    /// Sample each basis state through the simulator.
    Measured { shots: u64, seed: u64 },
}

/// Calibration for tomography qubits with the given readout errors
/// (`readout[k]` belongs to qubit `k`).
pub fn build_calibration(
    readout: &[ReadoutError],
    mode: CalibrationMode,
) -> Result<CalibrationMatrix> {
    let n = readout.len();
    check_width(n)?;
    let dim = 1usize << n;
    let matrix = match mode {
        CalibrationMode::Analytic => {
            let per: Vec<_> = readout.iter().map(|&e| confusion(e)).collect();
            DMatrix::from_fn(dim, dim, |i, j| {
                (0..n).map(|k| per[k][i >> k & 1][j >> k & 1]).product()
            })
        }
        CalibrationMode::Measured { shots, seed } => {
            let mut m = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                let mut c = Circuit::new(n)?;
                c.add_register("c0", n)?;
                for k in 0..n {
                    if j >> k & 1 == 1 {
                        c.x(k)?;
                    }
                }
                for k in 0..n {
                    c.measure(k, "c0", k)?;
                }
                let noise = NoiseSpec {
                    readout: readout.to_vec(),
                    depolarizing_per_cx: 0.0,
                    rng_seed: seed.wrapping_add(j as u64),
                };
                let record = sample_shots(&c, shots, &noise)?;
                for (bits, &count) in record.counts("c0").into_iter().flatten() {
                    m[(bitstring_value(bits)?, j)] += count as f64 / record.shots_kept as f64;
                }
            }
            m
        }
    };
    CalibrationMatrix::new(n, matrix)
}

/// `M⁻¹ · p` without clipping.
pub fn unfold(probs: &[f64], cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    if probs.len() != cal.matrix.nrows() {
        return Err(Error::arg(format!(
            "distribution has {} entries for a {}-outcome calibration",
            probs.len(),
            cal.matrix.nrows()
        )));
    }
    let cond = cal.condition_number();
    if !(cond < tolerance::MAX_CALIBRATION_CONDITION) {
        return Err(Error::Conditioning(cond));
    }
    let x = cal
        .matrix
        .clone()
        .lu()
        .solve(&nalgebra::DVector::from_column_slice(probs))
        .ok_or(Error::Conditioning(f64::INFINITY))?;
    Ok(x.iter().copied().collect())
}

/// Mitigated distribution: unfold, clip negatives, renormalize.
pub fn mitigate(probs: &[f64], cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    let mut x = unfold(probs, cal)?;
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        x.iter_mut().for_each(|v| *v /= total);
    }
    Ok(x)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Counts file accepted by the `tomo` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsFile {
    pub n_qubits: usize,
    /// Setting label (e.g. `"XZY"`, qubit 0 first) to register counts.
    pub settings: BTreeMap<String, BTreeMap<String, u64>>,
    #[serde(default)]
    pub calibration: Option<CalibrationMatrix>,
}

impl CountsFile {
    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        let mut data = Vec::new();
        for (label, counts) in &self.settings {
            let setting = TomographySetting::parse(label)?;
            let mut d = SettingData::from_counts(setting, counts)?;
            if let Some(cal) = &self.calibration {
                d.probs = mitigate(&d.probs, cal)?;
            }
            data.push(d);
        }
        reconstruct(
            self.n_qubits,
            &expectations_from_data(self.n_qubits, &data)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{outer, trace_distance, CVector};
    use crate::simulator::{run_statevector, Initial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        settings(n).unwrap().iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn setting_enumeration() {
        assert_eq!(labels(1), ["X", "Y", "Z"]);
        let two = labels(2);
        assert_eq!(two.first().unwrap(), "XX");
        assert_eq!(two.last().unwrap(), "ZZ");
        assert_eq!(two[1], "XY");
        assert_eq!(settings(3).unwrap().len(), 27);
        assert!(matches!(settings(0), Err(Error::Capacity(_))));
        assert!(matches!(settings(6), Err(Error::Capacity(_))));
    }

    #[test]
    fn z_setting_only_measures() {
        let frag = measurement_rotation(&TomographySetting::parse("ZZ").unwrap(), &[0, 1], "c0");
        assert_eq!(frag.len(), 2);
        assert!(frag.iter().all(|op| !op.is_gate()));
    }

    fn prob_zero_after_rotation(prep: &[CircuitOp], basis: &str) -> f64 {
        let mut c = Circuit::new(1).unwrap();
        c.append_all(prep.iter().cloned()).unwrap();
        let rot = measurement_rotation(&TomographySetting::parse(basis).unwrap(), &[0], "c0");
        c.append_all(rot.into_iter().filter(CircuitOp::is_gate))
            .unwrap();
        let s = run_statevector(&c, Initial::Basis(0)).unwrap();
        s.outcome_probability(0, 0)
    }

    #[test]
    fn eigenstates_read_zero() {
        let plus = [CircuitOp::gate(GateKind::H, [0])];
        assert!((prob_zero_after_rotation(&plus, "X") - 1.0).abs() < 1e-12);
        let plus_i = [
            CircuitOp::gate(GateKind::H, [0]),
            CircuitOp::gate(GateKind::RZ(FRAC_PI_2), [0]),
        ];
        assert!((prob_zero_after_rotation(&plus_i, "Y") - 1.0).abs() < 1e-12);
    }

    fn exact_data(rho: &CMatrix, n: usize) -> Vec<SettingData> {
        settings(n)
            .unwrap()
            .into_iter()
            .map(|s| SettingData {
                probs: exact_setting_probs(rho, &s).unwrap(),
                setting: s,
            })
            .collect()
    }

    fn value(e: &[PauliExpectation], label: &str) -> f64 {
        let want: Vec<Pauli> = label
            .chars()
            .map(|c| match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        e.iter().find(|x| x.pauli == want).unwrap().value
    }

    #[test]
    fn zero_state_expectations() {
        let rho = outer(&CVector::from_vec(vec![ONE, ZERO]));
        let e = expectations_from_data(1, &exact_data(&rho, 1)).unwrap();
        assert!((value(&e, "Z") - 1.0).abs() < 1e-12);
        assert!(value(&e, "X").abs() < 1e-12 && value(&e, "Y").abs() < 1e-12);
        assert_eq!(value(&e, "I"), 1.0);
    }

    #[test]
    fn bell_state_correlations() {
        let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = outer(&CVector::from_vec(vec![h, ZERO, ZERO, h]));
        let e = expectations_from_data(2, &exact_data(&rho, 2)).unwrap();
        assert!((value(&e, "XX") - 1.0).abs() < 1e-12);
        assert!((value(&e, "ZZ") - 1.0).abs() < 1e-12);
        assert!((value(&e, "YY") + 1.0).abs() < 1e-12);
        assert!(value(&e, "XZ").abs() < 1e-12);
    }

    #[test]
    fn uniform_counts_average_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = BTreeMap::new();
        for s in settings(2).unwrap() {
            let mut c = BTreeMap::new();
            for _ in 0..40_000 {
                let o: usize = rng.random_range(0..4);
                *c.entry(format!("{:02b}", o)).or_insert(0u64) += 1;
            }
            counts.insert(s, c);
        }
        let e = expectations_from_counts(2, &counts).unwrap();
        for x in &e[1..] {
            assert!(x.value.abs() < 0.03, "{x:?}");
        }
    }

    #[test]
    fn missing_setting_is_incomplete() {
        let rho = DensityMatrix::maximally_mixed(2).into_matrix();
        let mut data = exact_data(&rho, 2);
        data.pop();
        assert!(matches!(
            expectations_from_data(2, &data),
            Err(Error::IncompleteData(_))
        ));
    }

    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let dim = 1 << n;
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let p = &a * a.adjoint();
        let t = p.trace();
        p / t
    }

    #[test]
    fn exact_round_trip_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=3 {
            for _ in 0..5 {
                let rho = random_density(n, &mut rng);
                let via_settings =
                    reconstruct(n, &expectations_from_data(n, &exact_data(&rho, n)).unwrap())
                        .unwrap();
                assert!(trace_distance(via_settings.matrix(), &rho).unwrap() < 1e-9);
                let direct = reconstruct(n, &exact_expectations(&rho).unwrap()).unwrap();
                assert!(trace_distance(direct.matrix(), &rho).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_expectations_give_maximally_mixed() {
        let e: Vec<_> = pauli_strings(2)
            .into_iter()
            .map(|p| {
                let value = if p.iter().all(|&x| x == Pauli::I) {
                    1.0
                } else {
                    0.0
                };
                PauliExpectation { pauli: p, value }
            })
            .collect();
        let rho = reconstruct(2, &e).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(trace_distance(rho.matrix(), mixed.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn perturbation_stays_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 2;
        let rho = random_density(n, &mut rng);
        let mut e = exact_expectations(&rho).unwrap();
        for x in e.iter_mut().skip(1) {
            x.value += if rng.random::<bool>() { 1e-3 } else { -1e-3 };
        }
        let rec = reconstruct(n, &e).unwrap();
        assert!(trace_distance(rec.matrix(), &rho).unwrap() <= 4f64.powi(n as i32) * 1e-3);
    }

    #[test]
    fn calibration_examples() {
        let id =
            build_calibration(&[ReadoutError::default(); 2], CalibrationMode::Analytic).unwrap();
        assert_eq!(id.matrix(), &DMatrix::<f64>::identity(4, 4));

        let one =
            build_calibration(&[ReadoutError::symmetric(0.02)], CalibrationMode::Analytic).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[0.98, 0.02, 0.02, 0.98]);
        assert!((one.matrix() - want).abs().max() < 1e-15);

        let (a, b) = (
            ReadoutError {
                p01: 0.01,
                p10: 0.05,
            },
            ReadoutError {
                p01: 0.03,
                p10: 0.02,
            },
        );
        let two = build_calibration(&[a, b], CalibrationMode::Analytic).unwrap();
        let ma = confusion(a);
        let mb = confusion(b);
        // Outcome bit 1 (qubit 1) is the high bit, so qubit 1 is the outer factor.
        let outer_m = DMatrix::from_fn(2, 2, |i, j| mb[i][j]);
        let inner_m = DMatrix::from_fn(2, 2, |i, j| ma[i][j]);
        assert!((two.matrix() - outer_m.kronecker(&inner_m)).abs().max() < 1e-15);

        let measured = build_calibration(
            &[a, b],
            CalibrationMode::Measured {
                shots: 200_000,
                seed: 4,
            },
        )
        .unwrap();
        assert!((measured.matrix() - two.matrix()).abs().max() < 5e-3);
    }

    #[test]
    fn mitigation_inverts_exactly() {
        let cal = build_calibration(
            &[
                ReadoutError::symmetric(0.02),
                ReadoutError {
                    p01: 0.04,
                    p10: 0.01,
                },
            ],
            CalibrationMode::Analytic,
        )
        .unwrap();
        let truth = [0.1, 0.4, 0.3, 0.2];
        let obs = cal.apply(&truth);
        let back = unfold(&obs, &cal).unwrap();
        assert!(truth.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-10));
        let same = mitigate(&truth, &CalibrationMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(same, truth);
    }

    #[test]
    fn singular_calibration_is_rejected() {
        let cal = CalibrationMatrix::new(1, DMatrix::from_element(2, 2, 0.5)).unwrap();
        assert!(matches!(
            mitigate(&[0.5, 0.5], &cal),
            Err(Error::Conditioning(_))
        ));
    }

    #[test]
    fn calibration_json_round_trip() {
        let cal =
            build_calibration(&[ReadoutError::symmetric(0.02)], CalibrationMode::Analytic).unwrap();
        let text = serde_json::to_string(&cal).unwrap();
        assert_eq!(
            serde_json::from_str::<CalibrationMatrix>(&text).unwrap(),
            cal
        );
        assert!(serde_json::from_str::<CalibrationMatrix>(
            r#"{"n_qubits":1,"matrix":[[1,0],[0.5,1]]}"#
        )
        .is_err());
    }
}
