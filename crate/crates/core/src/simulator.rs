//! Statevector execution: exact evolution with renormalizing post-selection,
//! and seeded shot sampling with rejection post-selection and synthetic
//! device noise.
//!
//! Sampling draws every shot from its own ChaCha stream (`stream = shot
//! index` under the root seed), so a record depends only on the circuit,
//! the shot count and the [`NoiseSpec`], never on how shots are split across
//! threads.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitOp, Clbit, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{apply_local, outer, partial_trace, CMatrix, CVector, ONE, ZERO};
use crate::tolerance;

/// Little-endian bitstring: `bits[k]` is the rightmost-but-`k` character.
pub fn bits_to_bitstring(bits: &[u8]) -> String {
    bits.iter()
        .rev()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

/// Inverse of [`bits_to_bitstring`].
pub fn bitstring_to_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .rev()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::arg(format!("invalid bit `{other}` in `{s}`"))),
        })
        .collect()
}

/// Integer value of a little-endian bitstring (bit `k` has weight `2^k`).
pub fn bitstring_value(s: &str) -> Result<usize> {
    Ok(bitstring_to_bits(s)?
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &b)| acc | (b as usize) << k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    n_qubits: usize,
    amplitudes: CVector,
    accumulated_postselect_prob: f64,
}

impl SimState {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        SimState::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(Error::arg(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = CVector::zeros(1 << n_qubits);
        amplitudes[index] = ONE;
        Ok(SimState {
            n_qubits,
            amplitudes,
            accumulated_postselect_prob: 1.0,
        })
    }

    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        let n_qubits = crate::qmath::qubit_count(amplitudes.len())
            .ok_or_else(|| Error::arg("amplitude count is not a power of two"))?;
        check_width(n_qubits)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tolerance::EXACT {
            return Err(Error::arg(format!("state norm is {norm}")));
        }
        Ok(SimState {
            n_qubits,
            amplitudes,
            accumulated_postselect_prob: 1.0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Product of every post-selection branch probability taken so far.
    pub fn accumulated_postselect_prob(&self) -> f64 {
        self.accumulated_postselect_prob
    }

    pub fn apply(&mut self, op: &CircuitOp) -> Result<()> {
        match op {
            CircuitOp::Gate { kind, qubits } => {
                if kind.arity() != qubits.len() || qubits.iter().any(|&q| q >= self.n_qubits) {
                    return Err(Error::arg(format!(
                        "{} on qubits {qubits:?} does not fit {} qubits",
                        kind.name(),
                        self.n_qubits
                    )));
                }
                apply_local(
                    self.amplitudes.as_mut_slice(),
                    self.n_qubits,
                    qubits,
                    &kind.matrix()?,
                );
                Ok(())
            }
            CircuitOp::PostSelect { qubit, outcome, .. } => {
                self.post_select(*qubit, *outcome).map(|_| ())
            }
            CircuitOp::Measure { .. } => Err(Error::Contract(
                "measurements have no exact statevector semantics; sample instead".into(),
            )),
        }
    }

    /// Probability that `qubit` reads `outcome`.
    pub fn outcome_probability(&self, qubit: usize, outcome: u8) -> f64 {
        let shift = self.n_qubits - 1 - qubit;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift & 1) as u8 == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Project `qubit` onto `outcome`, renormalize, and return the branch
    /// probability.
    pub fn post_select(&mut self, qubit: usize, outcome: u8) -> Result<f64> {
        if qubit >= self.n_qubits || outcome > 1 {
            return Err(Error::arg(format!(
                "post-select of qubit {qubit} onto {outcome} on {} qubits",
                self.n_qubits
            )));
        }
        let probability = self.outcome_probability(qubit, outcome);
        if probability < tolerance::IMPOSSIBLE_BRANCH {
            return Err(Error::ImpossibleBranch {
                qubit,
                outcome,
                probability,
            });
        }
        let shift = self.n_qubits - 1 - qubit;
        let scale = 1.0 / probability.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i >> shift & 1) as u8 == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        self.accumulated_postselect_prob *= probability;
        Ok(probability)
    }

    /// Born probabilities of every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Reduced density matrix over `keep` (ascending qubit order).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<CMatrix> {
        partial_trace(&outer(&self.amplitudes), keep, self.n_qubits)
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > tolerance::MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "{n} qubits outside 1..={}",
            tolerance::MAX_QUBITS
        )));
    }
    Ok(())
}

pub fn apply_gate(mut state: SimState, op: &CircuitOp) -> Result<SimState> {
    if !op.is_gate() {
        return Err(Error::Contract("apply_gate needs a gate op".into()));
    }
    state.apply(op)?;
    Ok(state)
}

/// Returns the renormalized branch and its probability.
pub fn post_select(mut state: SimState, qubit: usize, outcome: u8) -> Result<(SimState, f64)> {
    let p = state.post_select(qubit, outcome)?;
    Ok((state, p))
}

/// Starting point for [`run_statevector`].
#[derive(Debug, Clone)]
pub enum Initial {
    Basis(usize),
    State(SimState),
}

impl From<SimState> for Initial {
    fn from(s: SimState) -> Self {
        Initial::State(s)
    }
}

/// Execute every gate and post-selection of `circuit` exactly.
pub fn run_statevector(circuit: &Circuit, initial: impl Into<Initial>) -> Result<SimState> {
    let mut state = match initial.into() {
        Initial::Basis(i) => SimState::basis(circuit.n_qubits(), i)?,
        Initial::State(s) => {
            if s.n_qubits != circuit.n_qubits() {
                return Err(Error::arg(format!(
                    "{}-qubit state for a {}-qubit circuit",
                    s.n_qubits,
                    circuit.n_qubits()
                )));
            }
            s
        }
    };
    for op in circuit.ops() {
        state.apply(op)?;
    }
    Ok(state)
}

/// Per-qubit readout confusion.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutError {
    /// P(read 1 | true 0).
    pub p01: f64,
    /// P(read 0 | true 1).
    pub p10: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        ReadoutError { p01: p, p10: p }
    }

    pub fn is_zero(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }
}

/// Synthetic device noise for [`sample_shots`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseSpec {
    /// Indexed by circuit qubit; qubits past the end read out perfectly.
    pub readout: Vec<ReadoutError>,
    /// Probability that a CX is followed by a uniformly random non-identity
    /// two-qubit Pauli on its operands.
    pub depolarizing_per_cx: f64,
    pub rng_seed: u64,
}

impl NoiseSpec {
    pub fn ideal(rng_seed: u64) -> Self {
        NoiseSpec {
            rng_seed,
            ..NoiseSpec::default()
        }
    }

    pub fn with_readout(mut self, n_qubits: usize, error: ReadoutError) -> Self {
        self.readout = vec![error; n_qubits];
        self
    }

    pub fn with_depolarizing(mut self, p: f64) -> Self {
        self.depolarizing_per_cx = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutError {
        self.readout.get(qubit).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        if !in_unit(self.depolarizing_per_cx) {
            return Err(Error::arg(format!(
                "depolarizing probability {} outside [0, 1]",
                self.depolarizing_per_cx
            )));
        }
        if let Some(e) = self
            .readout
            .iter()
            .find(|e| !in_unit(e.p01) || !in_unit(e.p10))
        {
            return Err(Error::arg(format!("readout error {e:?} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Outcome of [`sample_shots`].
///
/// `registers` holds, for every classical register, the histogram of its
/// little-endian bitstring over the kept shots. `postselect_survivors[k]` is
/// the number of shots that passed the first `k + 1` post-selections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    #[serde(flatten)]
    pub registers: BTreeMap<String, BTreeMap<String, u64>>,
    pub shots_requested: u64,
    pub shots_kept: u64,
    #[serde(default)]
    pub postselect_survivors: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    /// Every shot was rejected by post-selection.
    Empty,
}

impl ShotRecord {
    pub fn status(&self) -> RecordStatus {
        if self.shots_kept == 0 {
            RecordStatus::Empty
        } else {
            RecordStatus::Ok
        }
    }

    pub fn counts(&self, register: &str) -> Option<&BTreeMap<String, u64>> {
        self.registers.get(register)
    }

    /// Fraction of requested shots that survived every post-selection.
    pub fn kept_fraction(&self) -> f64 {
        self.shots_kept as f64 / self.shots_requested as f64
    }
}

/// Everything about one noise realization that sampling needs.
struct Trajectory {
    /// P(pass post-selection k | passed all earlier ones).
    branch_probs: Vec<f64>,
    /// Cumulative distribution over the joint measured outcome.
    cdf: Vec<f64>,
}

/// Partial execution of one noise realization.
#[derive(Clone)]
struct Walk {
    amps: Vec<Complex64>,
    branch_probs: Vec<f64>,
    alive: bool,
}

impl Walk {
    fn start(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Walk {
            amps,
            branch_probs: Vec::new(),
            alive: true,
        }
    }
}

/// A (CX slot, Pauli index 1..16) error. The Pauli index encodes
/// `4 * control + target` with 0 = I, 1 = X, 2 = Y, 3 = Z.
type ErrorPattern = Vec<(u32, u8)>;

struct Program<'a> {
    circuit: &'a Circuit,
    matrices: Vec<Option<CMatrix>>,
    cx_slots: Vec<usize>,
    measured: Vec<(usize, Clbit)>,
    n_postselect: usize,
}

fn pauli_matrix(index: u8) -> Option<CMatrix> {
    use crate::qmath::{c64, cmatrix, I};
    match index {
        0 => None,
        1 => Some(cmatrix([[ZERO, ONE], [ONE, ZERO]])),
        2 => Some(cmatrix([[ZERO, -I], [I, ZERO]])),
        3 => Some(cmatrix([[ONE, ZERO], [ZERO, c64(-1.0, 0.0)]])),
        _ => unreachable!("Pauli index {index}"),
    }
}

impl<'a> Program<'a> {
    fn compile(circuit: &'a Circuit) -> Result<Self> {
        let mut matrices = Vec::with_capacity(circuit.ops().len());
        let mut cx_slots = Vec::new();
        let mut measured = Vec::new();
        let mut n_postselect = 0;
        for (i, op) in circuit.ops().iter().enumerate() {
            match op {
                CircuitOp::Gate { kind, .. } => {
                    if *kind == GateKind::CX {
                        cx_slots.push(i);
                    }
                    matrices.push(Some(kind.matrix()?));
                }
                CircuitOp::Measure { qubit, clbit } => {
                    measured.push((*qubit, clbit.clone()));
                    matrices.push(None);
                }
                CircuitOp::PostSelect { .. } => {
                    n_postselect += 1;
                    matrices.push(None);
                }
            }
        }
        Ok(Program {
            circuit,
            matrices,
            cx_slots,
            measured,
            n_postselect,
        })
    }

    /// Noise-free state right after each CX, before any error is injected.
    fn checkpoints(&self) -> Vec<Walk> {
        let mut out = Vec::with_capacity(self.cx_slots.len());
        let mut walk = Walk::start(self.circuit.n_qubits());
        let mut from = 0;
        for &slot in &self.cx_slots {
            self.advance(&mut walk, from, slot + 1, &[]);
            out.push(walk.clone());
            from = slot + 1;
        }
        out
    }

    /// State after ops `0..to` for errors confined to that range, resumed
    /// from the checkpoint of the first faulty CX.
    fn walk_to(&self, pattern: &[(u32, u8)], checkpoints: &[Walk], to: usize) -> Walk {
        let Some(&(slot, _)) = pattern.first() else {
            let mut walk = Walk::start(self.circuit.n_qubits());
            self.advance(&mut walk, 0, to, &[]);
            return walk;
        };
        let mut walk = checkpoints[slot as usize].clone();
        let i = self.cx_slots[slot as usize];
        let mut errors = pattern.iter().peekable();
        self.inject(&mut walk, i, &mut errors);
        let rest: Vec<(u32, u8)> = errors.copied().collect();
        self.advance(&mut walk, i + 1, to, &rest);
        walk
    }

    fn trajectory(
        &self,
        pattern: &[(u32, u8)],
        checkpoints: &[Walk],
        prefix: Option<&Prefix>,
    ) -> Trajectory {
        let total = self.circuit.ops().len();
        let Some(prefix) = prefix else {
            return self.finish(self.walk_to(pattern, checkpoints, total));
        };
        let split = pattern.partition_point(|&(slot, _)| (slot as usize) < prefix.slots);
        let head = &pattern[..split];
        let cached = prefix.walks.lock().expect("prefix lock").get(head).cloned();
        let start = match cached {
            Some(w) => w,
            None => {
                let w = Arc::new(self.walk_to(head, checkpoints, prefix.len));
                prefix
                    .walks
                    .lock()
                    .expect("prefix lock")
                    .insert(head.to_vec(), Arc::clone(&w));
                w
            }
        };
        let mut walk = (*start).clone();
        self.advance(&mut walk, prefix.len, total, &pattern[split..]);
        self.finish(walk)
    }

    fn finish(&self, walk: Walk) -> Trajectory {
        let cdf = if walk.alive {
            self.measured_cdf(&walk.amps)
        } else {
            Vec::new()
        };
        Trajectory {
            branch_probs: walk.branch_probs,
            cdf,
        }
    }

    /// Apply the errors of `pattern` that belong to the CX at op index `i`.
    fn inject<'p>(
        &self,
        walk: &mut Walk,
        i: usize,
        errors: &mut std::iter::Peekable<impl Iterator<Item = &'p (u32, u8)>>,
    ) {
        let n = self.circuit.n_qubits();
        let qubits = self.circuit.ops()[i].qubits();
        while let Some(&&(slot, pauli)) = errors.peek() {
            if self.cx_slots[slot as usize] != i {
                break;
            }
            errors.next();
            if !walk.alive {
                continue;
            }
            for (q, p) in qubits.iter().zip([pauli / 4, pauli % 4]) {
                if let Some(pm) = pauli_matrix(p) {
                    apply_local(&mut walk.amps, n, &[*q], &pm);
                }
            }
        }
    }

    /// Run ops `from..to`, injecting errors listed in `pattern`.
    fn advance(&self, walk: &mut Walk, from: usize, to: usize, pattern: &[(u32, u8)]) {
        let n = self.circuit.n_qubits();
        let mut errors = pattern.iter().peekable();
        for (i, op) in self.circuit.ops().iter().enumerate().take(to).skip(from) {
            match op {
                CircuitOp::Gate { qubits, .. } => {
                    if walk.alive {
                        let m = self.matrices[i].as_ref().expect("gate matrix compiled");
                        apply_local(&mut walk.amps, n, qubits, m);
                    }
                    self.inject(walk, i, &mut errors);
                }
                CircuitOp::PostSelect { qubit, outcome, .. } => {
                    if !walk.alive {
                        walk.branch_probs.push(0.0);
                        continue;
                    }
                    let shift = n - 1 - qubit;
                    let keep = |idx: usize| (idx >> shift & 1) as u8 == *outcome;
                    let p: f64 = walk
                        .amps
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| keep(*idx))
                        .map(|(_, a)| a.norm_sqr())
                        .sum();
                    walk.branch_probs.push(p);
                    if p < tolerance::IMPOSSIBLE_BRANCH {
                        walk.alive = false;
                        continue;
                    }
                    let scale = 1.0 / p.sqrt();
                    for (idx, a) in walk.amps.iter_mut().enumerate() {
                        *a = if keep(idx) { *a * scale } else { ZERO };
                    }
                }
                CircuitOp::Measure { .. } => {}
            }
        }
    }

    fn measured_cdf(&self, amps: &[Complex64]) -> Vec<f64> {
        let n = self.circuit.n_qubits();
        let m = self.measured.len();
        let mut probs = vec![0.0; 1 << m];
        for (idx, a) in amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let outcome = self
                .measured
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, (q, _))| {
                    acc | (idx >> (n - 1 - q) & 1) << k
                });
            probs[outcome] += p;
        }
        let mut acc = 0.0;
        probs
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

#[derive(Default)]
struct Tally {
    outcomes: HashMap<usize, u64>,
    survivors: Vec<u64>,
    kept: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.outcomes {
            *self.outcomes.entry(k).or_default() += v;
        }
        if self.survivors.len() < other.survivors.len() {
            self.survivors.resize(other.survivors.len(), 0);
        }
        for (a, b) in self.survivors.iter_mut().zip(other.survivors) {
            *a += b;
        }
        self.kept += other.kept;
        self
    }
}

const SHOT_CHUNK: u64 = 4096;

/// Noisy states at the end of a shared op prefix, keyed by the errors
/// that fell inside it.
struct Prefix {
    len: usize,
    slots: usize,
    walks: Mutex<HashMap<ErrorPattern, Arc<Walk>>>,
}

/// Sample `shots` runs of `circuit` from `|0…0⟩`.
pub fn sample_shots(circuit: &Circuit, shots: u64, noise: &NoiseSpec) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::arg("at least one shot is required"));
    }
    noise.validate()?;
    sample_program(&Program::compile(circuit)?, shots, noise, None)
}

/// Sample several circuits, each with its own noise spec. Results equal
/// separate [`sample_shots`] calls; circuits that share a leading run of
/// ops (tomography settings, for instance) reuse the noisy states at its end.
pub fn sample_batch(jobs: &[(&Circuit, NoiseSpec)], shots: u64) -> Result<Vec<ShotRecord>> {
    if shots == 0 {
        return Err(Error::arg("at least one shot is required"));
    }
    let programs = jobs
        .iter()
        .map(|(c, noise)| {
            noise.validate()?;
            Program::compile(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let prefix = jobs.split_first().map(|((first, _), rest)| {
        let ops = first.ops();
        let len = rest
            .iter()
            .map(|(c, _)| {
                if c.n_qubits() != first.n_qubits() {
                    return 0;
                }
                ops.iter().zip(c.ops()).take_while(|(a, b)| a == b).count()
            })
            .min()
            .unwrap_or(ops.len());
        Prefix {
            len,
            slots: programs[0].cx_slots.partition_point(|&i| i < len),
            walks: Mutex::new(HashMap::new()),
        }
    });
    let prefix = prefix.filter(|p| p.len > 0 && jobs.len() > 1);
    programs
        .iter()
        .zip(jobs)
        .map(|(program, (_, noise))| sample_program(program, shots, noise, prefix.as_ref()))
        .collect()
}

fn sample_program(
    program: &Program,
    shots: u64,
    noise: &NoiseSpec,
    prefix: Option<&Prefix>,
) -> Result<ShotRecord> {
    let circuit = program.circuit;
    let base = ChaCha8Rng::seed_from_u64(noise.rng_seed);
    let readout: Vec<ReadoutError> = program
        .measured
        .iter()
        .map(|(q, _)| noise.readout_for(*q))
        .collect();
    let depol = noise.depolarizing_per_cx;

    let chunks: Vec<(u64, u64)> = (0..shots.div_ceil(SHOT_CHUNK))
        .map(|c| (c * SHOT_CHUNK, ((c + 1) * SHOT_CHUNK).min(shots)))
        .collect();

    let checkpoints = if depol > 0.0 {
        program.checkpoints()
    } else {
        Vec::new()
    };
    // Trajectories are pure functions of the pattern, so sharing them across
    // chunks cannot change any sampled value.
    let cache: Mutex<HashMap<ErrorPattern, Arc<Trajectory>>> = Mutex::new(HashMap::new());
    let tally = chunks
        .into_par_iter()
        .map(|(start, end)| {
            let mut tally = Tally {
                survivors: vec![0; program.n_postselect],
                ..Tally::default()
            };
            let mut pattern: ErrorPattern = Vec::new();
            for shot in start..end {
                let mut rng = base.clone();
                rng.set_stream(shot);

                pattern.clear();
                if depol > 0.0 {
                    for slot in 0..program.cx_slots.len() {
                        if rng.random::<f64>() < depol {
                            pattern.push((slot as u32, rng.random_range(1..16u8)));
                        }
                    }
                }
                let cached = cache.lock().expect("cache lock").get(&pattern).cloned();
                let traj = match cached {
                    Some(t) => t,
                    None => {
                        let t = Arc::new(program.trajectory(&pattern, &checkpoints, prefix));
                        cache
                            .lock()
                            .expect("cache lock")
                            .insert(pattern.clone(), Arc::clone(&t));
                        t
                    }
                };

                let mut survived = true;
                for (k, &p) in traj.branch_probs.iter().enumerate() {
                    if rng.random::<f64>() >= p {
                        survived = false;
                        break;
                    }
                    tally.survivors[k] += 1;
                }
                if !survived {
                    continue;
                }
                tally.kept += 1;

                let u: f64 = rng.random::<f64>() * traj.cdf.last().copied().unwrap_or(1.0);
                let mut outcome = traj
                    .cdf
                    .partition_point(|&c| c <= u)
                    .min(traj.cdf.len() - 1);
                for (k, e) in readout.iter().enumerate() {
                    if e.is_zero() {
                        continue;
                    }
                    let flip = if outcome >> k & 1 == 0 { e.p01 } else { e.p10 };
                    if rng.random::<f64>() < flip {
                        outcome ^= 1 << k;
                    }
                }
                *tally.outcomes.entry(outcome).or_default() += 1;
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    let mut registers: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut fixed: HashMap<&str, Vec<(usize, u8)>> = HashMap::new();
    for op in circuit.ops() {
        if let CircuitOp::PostSelect {
            outcome,
            clbit: Some(c),
            ..
        } = op
        {
            fixed
                .entry(c.register.as_str())
                .or_default()
                .push((c.index, *outcome));
        }
    }
    for reg in circuit.registers() {
        let mut hist = BTreeMap::new();
        let mut outcomes: Vec<(&usize, &u64)> = tally.outcomes.iter().collect();
        outcomes.sort();
        for (&outcome, &count) in outcomes {
            let mut bits = vec![0u8; reg.size];
            for &(idx, val) in fixed.get(reg.name.as_str()).into_iter().flatten() {
                bits[idx] = val;
            }
            for (k, (_, clbit)) in program.measured.iter().enumerate() {
                if clbit.register == reg.name {
                    bits[clbit.index] = (outcome >> k & 1) as u8;
                }
            }
            *hist.entry(bits_to_bitstring(&bits)).or_default() += count;
        }
        registers.insert(reg.name.clone(), hist);
    }

    let mut survivors = tally.survivors;
    survivors.resize(program.n_postselect, 0);
    Ok(ShotRecord {
        registers,
        shots_requested: shots,
        shots_kept: tally.kept,
        postselect_survivors: survivors,
    })
}
