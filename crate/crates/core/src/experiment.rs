//! The full router protocol: state preparation, damping channels, corrections,
//! controlled-swap routing and tomography on a seven-qubit register.
//!
//! Qubit layout: 0 control, 1 and 4 environments, 2 and 5 ancillas, 3 signal,
//! 6 blank. After the swap the output lives on (0, 3, 6) = (control, path 1,
//! path 2).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitOp, Clbit, GateKind};
use crate::correction::{
    analytic_p1, analytic_p2, channel_subcircuit, choose_theta, correction_subcircuit,
    ChannelParams, QubitSpec,
};
use crate::error::{Error, Result};
use crate::qmath::{c64, outer, tensor_vec, CVector, DensityMatrix, ONE, ZERO};
use crate::simulator::{
    run_statevector, sample_batch, Initial, NoiseSpec, ReadoutError, ShotRecord,
};
use crate::tomography::{
    build_calibration, expectations_from_data, measurement_rotation, mitigate, reconstruct,
    settings, CalibrationMatrix, CalibrationMode, SettingData, TomographySetting,
};
use crate::transpiler::{lower_and_route_identity, CouplingMap};

pub const CONTROL: usize = 0;
pub const ENV_CONTROL: usize = 1;
pub const ANCILLA_CONTROL: usize = 2;
pub const SIGNAL: usize = 3;
pub const ENV_SIGNAL: usize = 4;
pub const ANCILLA_SIGNAL: usize = 5;
pub const BLANK: usize = 6;
pub const WIDTH: usize = 7;
/// Output qubits in (control, path 1, path 2) order.
pub const OUTPUT: [usize; 3] = [CONTROL, SIGNAL, BLANK];

pub const TOMOGRAPHY_REGISTER: &str = "c0";
pub const POSTSELECT_REGISTER: &str = "c1";

/// Which qubits pass through a damping channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    BothQubits,
    SignalOnly,
    NoNoise,
}

impl Variant {
    /// Qubits as (system, environment, ancilla) triples.
    fn noisy(self) -> &'static [(usize, usize, usize)] {
        match self {
            Variant::BothQubits => &[
                (CONTROL, ENV_CONTROL, ANCILLA_CONTROL),
                (SIGNAL, ENV_SIGNAL, ANCILLA_SIGNAL),
            ],
            Variant::SignalOnly => &[(SIGNAL, ENV_SIGNAL, ANCILLA_SIGNAL)],
            Variant::NoNoise => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::BothQubits => "both-qubits",
            Variant::SignalOnly => "signal-only",
            Variant::NoNoise => "no-noise",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both-qubits" => Ok(Variant::BothQubits),
            "signal-only" => Ok(Variant::SignalOnly),
            "no-noise" => Ok(Variant::NoNoise),
            other => Err(Error::config(
                "variant",
                format!("`{other}` is not one of both-qubits, signal-only, no-noise"),
            )),
        }
    }
}

/// Control and signal input states; the blank starts in `|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouterInputs {
    pub control: QubitSpec,
    pub signal: QubitSpec,
}

impl RouterInputs {
    /// Control `(|0⟩ + |1⟩)/√2`, signal `cos(π/4)|0⟩ + e^{iπ/4} sin(π/4)|1⟩`.
    pub fn standard() -> Self {
        let h = c64(FRAC_1_SQRT_2, 0.0);
        RouterInputs {
            control: QubitSpec { alpha: h, beta: h },
            signal: QubitSpec {
                alpha: h,
                beta: c64(0.0, FRAC_PI_4).exp() * FRAC_1_SQRT_2,
            },
        }
    }
}

impl Default for RouterInputs {
    fn default() -> Self {
        Self::standard()
    }
}

/// `α_c|0⟩|φ_s⟩|0⟩ + β_c|1⟩|0⟩|φ_s⟩` over (control, path 1, path 2).
pub fn ideal_output(inputs: &RouterInputs) -> CVector {
    let zero = CVector::from_vec(vec![ONE, ZERO]);
    let one = CVector::from_vec(vec![ZERO, ONE]);
    let s = inputs.signal.to_vector();
    let stay = tensor_vec(&tensor_vec(&zero, &s).expect("small"), &zero).expect("small");
    let swap = tensor_vec(&tensor_vec(&one, &zero).expect("small"), &s).expect("small");
    stay * inputs.control.alpha + swap * inputs.control.beta
}

pub fn ideal_density(inputs: &RouterInputs) -> DensityMatrix {
    DensityMatrix::new(outer(&ideal_output(inputs))).expect("pure state")
}

fn close(a: QubitSpec, b: QubitSpec) -> bool {
    (a.alpha - b.alpha).norm() < 1e-12 && (a.beta - b.beta).norm() < 1e-12
}

/// Gates preparing `spec` from `|0⟩` on qubit `q`.
pub fn preparation(spec: &QubitSpec, q: usize) -> Vec<CircuitOp> {
    let standard = RouterInputs::standard();
    if close(*spec, QubitSpec::zero()) {
        vec![]
    } else if close(*spec, QubitSpec::one()) {
        vec![CircuitOp::gate(GateKind::X, [q])]
    } else if close(*spec, standard.control) {
        vec![CircuitOp::gate(GateKind::H, [q])]
    } else if close(*spec, standard.signal) {
        vec![
            CircuitOp::gate(GateKind::H, [q]),
            CircuitOp::gate(GateKind::T, [q]),
        ]
    } else {
        let (a, b) = (spec.alpha, spec.beta);
        let u = crate::qmath::cmatrix([[a, -b.conj()], [b, a.conj()]]);
        vec![CircuitOp::gate(GateKind::Custom(u), [q])]
    }
}

/// How a single router circuit is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouterSpec {
    pub inputs: RouterInputs,
    pub params: ChannelParams,
    pub variant: Variant,
    pub error_correction: bool,
}

impl RouterSpec {
    pub fn new(params: ChannelParams, variant: Variant, error_correction: bool) -> Result<Self> {
        if variant == Variant::NoNoise && error_correction {
            return Err(Error::config(
                "error_correction",
                "the no-noise variant has no channel to correct",
            ));
        }
        Ok(RouterSpec {
            inputs: RouterInputs::standard(),
            params,
            variant,
            error_correction,
        })
    }

    pub fn ideal(inputs: RouterInputs) -> Self {
        RouterSpec {
            inputs,
            params: ChannelParams {
                gamma: 0.0,
                gamma_guess: 0.5,
            },
            variant: Variant::NoNoise,
            error_correction: false,
        }
    }

    pub fn channel_count(&self) -> usize {
        self.variant.noisy().len()
    }

    pub fn correction_count(&self) -> usize {
        if self.error_correction {
            self.channel_count()
        } else {
            0
        }
    }

    /// Product of channel survival probabilities.
    pub fn p1_theory(&self) -> f64 {
        self.noisy_inputs()
            .map(|q| analytic_p1(&q, self.params.gamma))
            .product()
    }

    /// Correction success given channel survival.
    pub fn p_theory(&self) -> Result<f64> {
        if !self.error_correction {
            return Ok(1.0);
        }
        let theta = choose_theta(self.params.gamma_guess)?;
        self.noisy_inputs()
            .map(|q| analytic_p2(&q, self.params.gamma, theta))
            .product()
    }

    fn noisy_inputs(&self) -> impl Iterator<Item = QubitSpec> + '_ {
        self.variant.noisy().iter().map(move |&(sys, _, _)| {
            if sys == CONTROL {
                self.inputs.control
            } else {
                self.inputs.signal
            }
        })
    }
}

/// Build the seven-qubit router circuit, optionally ending in tomography.
pub fn build_router_circuit(
    spec: &RouterSpec,
    tomography: Option<&TomographySetting>,
) -> Result<Circuit> {
    if spec.variant == Variant::NoNoise && spec.error_correction {
        return Err(Error::config(
            "error_correction",
            "the no-noise variant has no channel to correct",
        ));
    }
    let mut c = Circuit::new(WIDTH)?;
    if tomography.is_some() {
        c.add_register(TOMOGRAPHY_REGISTER, OUTPUT.len())?;
    }
    let n_records = spec.channel_count() + spec.correction_count();
    if n_records > 0 {
        c.add_register(POSTSELECT_REGISTER, n_records)?;
    }

    c.append_all(preparation(&spec.inputs.control, CONTROL))?;
    c.append_all(preparation(&spec.inputs.signal, SIGNAL))?;

    let mut bit = 0;
    let mut record = || {
        bit += 1;
        Some(Clbit::new(POSTSELECT_REGISTER, bit - 1))
    };
    for &(sys, env, _) in spec.variant.noisy() {
        c.append_all(channel_subcircuit(spec.params.gamma, sys, env, record())?)?;
    }
    if spec.error_correction {
        let theta = choose_theta(spec.params.gamma_guess)?;
        for &(sys, _, anc) in spec.variant.noisy() {
            c.append_all(correction_subcircuit(theta, sys, anc, record())?)?;
        }
    }

    c.cswap(CONTROL, SIGNAL, BLANK)?;
    if let Some(setting) = tomography {
        c.append_all(measurement_rotation(setting, &OUTPUT, TOMOGRAPHY_REGISTER))?;
    }
    Ok(c)
}

/// Exact statevector outcome of one router circuit.
#[derive(Debug, Clone)]
pub struct ExactRun {
    pub output: DensityMatrix,
    /// Probability that every post-selection passes.
    pub postselect_probability: f64,
    pub fidelity: f64,
}

/// Run the router exactly, optionally after transpiling onto `map`.
pub fn run_exact(spec: &RouterSpec, map: Option<&CouplingMap>) -> Result<ExactRun> {
    let circuit = build_router_circuit(spec, None)?;
    let (circuit, output) = match map {
        Some(m) => {
            let r = lower_and_route_identity(&circuit, m)?;
            let out: Vec<usize> = OUTPUT.iter().map(|&q| r.final_permutation[q]).collect();
            (r.circuit, out)
        }
        None => (circuit, OUTPUT.to_vec()),
    };
    let state = run_statevector(&circuit, Initial::Basis(0))?;
    let rho = DensityMatrix::new(state.reduced_density(&output)?)?;
    // `reduced_density` keeps ascending qubit order; reorder to (control, path 1, path 2).
    let rho = reorder_output(rho, &output)?;
    let fidelity = rho.fidelity(&ideal_density(&spec.inputs))?;
    Ok(ExactRun {
        output: rho,
        postselect_probability: state.accumulated_postselect_prob(),
        fidelity,
    })
}

/// Permute a reduced state whose factors are in ascending physical order into
/// the order given by `qubits`.
fn reorder_output(rho: DensityMatrix, qubits: &[usize]) -> Result<DensityMatrix> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    if sorted == qubits {
        return Ok(rho);
    }
    let n = qubits.len();
    // position of requested qubit k inside the ascending list
    let pos: Vec<usize> = qubits
        .iter()
        .map(|q| sorted.iter().position(|s| s == q).expect("same set"))
        .collect();
    let dim = 1usize << n;
    let map = |idx: usize| {
        (0..n).fold(0usize, |acc, k| {
            acc | (idx >> (n - 1 - k) & 1) << (n - 1 - pos[k])
        })
    };
    let m = rho.matrix();
    DensityMatrix::new(crate::qmath::CMatrix::from_fn(dim, dim, |i, j| {
        m[(map(i), map(j))]
    }))
}

/// Injected device noise shared by every qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceNoise {
    #[serde(default)]
    pub readout: ReadoutError,
    #[serde(default)]
    pub depolarizing_per_cx: f64,
}

/// Everything `run_point` needs for one grid point.
#[derive(Debug, Clone)]
pub struct PointConfig {
    pub spec: RouterSpec,
    pub shots_per_setting: u64,
    pub base_seed: u64,
    pub noise: DeviceNoise,
    pub mitigation: bool,
    pub coupling_map: Option<CouplingMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Ok,
    /// Some setting kept no shots; fidelity is undefined.
    Empty,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub gamma: f64,
    pub gamma_guess: f64,
    pub fidelity: f64,
    pub success_prob_estimate: f64,
    pub success_prob_theory: f64,
    pub p1_theory: f64,
    pub shots_requested: u64,
    pub shots_kept: u64,
    pub reconstructed: Option<DensityMatrix>,
    pub repetition_index: u64,
    pub status: PointStatus,
}

pub fn repetition_seed(base_seed: u64, repetition: u64) -> u64 {
    base_seed.wrapping_mul(10007).wrapping_add(repetition)
}

fn setting_seed(rep_seed: u64, index: usize) -> u64 {
    rep_seed.wrapping_mul(1_000_003).wrapping_add(index as u64)
}

/// Readout calibration for the three output qubits.
pub fn output_calibration(noise: &DeviceNoise, shots: u64, seed: u64) -> Result<CalibrationMatrix> {
    let readout = vec![noise.readout; OUTPUT.len()];
    if noise.readout.is_zero() {
        return CalibrationMatrix::identity(OUTPUT.len());
    }
    build_calibration(&readout, CalibrationMode::Measured { shots, seed })
}

/// Sampled circuits for every tomography setting, transpiled when requested.
pub fn tomography_circuits(config: &PointConfig) -> Result<Vec<(TomographySetting, Circuit)>> {
    settings(OUTPUT.len())?
        .into_iter()
        .map(|s| {
            let c = build_router_circuit(&config.spec, Some(&s))?;
            let c = match &config.coupling_map {
                Some(map) => lower_and_route_identity(&c, map)?.circuit,
                None => c,
            };
            Ok((s, c))
        })
        .collect()
}

/// One repetition of one grid point: 27 sampled settings, optional readout
/// mitigation, reconstruction, fidelity and success-probability estimate.
pub fn run_point(config: &PointConfig, repetition: u64) -> Result<ExperimentResult> {
    run_point_with(config, repetition, &tomography_circuits(config)?)
}

/// [`run_point`] with circuits prepared once by [`tomography_circuits`].
pub fn run_point_with(
    config: &PointConfig,
    repetition: u64,
    circuits: &[(TomographySetting, Circuit)],
) -> Result<ExperimentResult> {
    let spec = &config.spec;
    let rep_seed = repetition_seed(config.base_seed, repetition);
    let jobs: Vec<(&Circuit, NoiseSpec)> = circuits
        .iter()
        .enumerate()
        .map(|(i, (_, c))| {
            let noise = NoiseSpec {
                readout: vec![config.noise.readout; c.n_qubits()],
                depolarizing_per_cx: config.noise.depolarizing_per_cx,
                rng_seed: setting_seed(rep_seed, i),
            };
            (c, noise)
        })
        .collect();
    let records: Vec<ShotRecord> = sample_batch(&jobs, config.shots_per_setting)?;

    let channels = spec.channel_count();
    let (mut after_channels, mut after_all) = (0u64, 0u64);
    let mut shots_kept = 0;
    for r in &records {
        shots_kept += r.shots_kept;
        after_all += r.shots_kept;
        after_channels += if channels == 0 {
            r.shots_requested
        } else {
            r.postselect_survivors[channels - 1]
        };
    }
    let success_prob_estimate = if spec.correction_count() == 0 {
        1.0
    } else if after_channels == 0 {
        f64::NAN
    } else {
        after_all as f64 / after_channels as f64
    };

    let base = ExperimentResult {
        gamma: spec.params.gamma,
        gamma_guess: spec.params.gamma_guess,
        fidelity: f64::NAN,
        success_prob_estimate,
        success_prob_theory: spec.p_theory()?,
        p1_theory: spec.p1_theory(),
        shots_requested: config.shots_per_setting * circuits.len() as u64,
        shots_kept,
        reconstructed: None,
        repetition_index: repetition,
        status: PointStatus::Empty,
    };
    if records.iter().any(|r| r.shots_kept == 0) {
        return Ok(base);
    }

    let calibration = if config.mitigation {
        Some(output_calibration(
            &config.noise,
            config.shots_per_setting,
            rep_seed.wrapping_add(0x5eed),
        )?)
    } else {
        None
    };
    let data = circuits
        .iter()
        .zip(&records)
        .map(|((s, _), r)| {
            let counts = r
                .counts(TOMOGRAPHY_REGISTER)
                .ok_or_else(|| Error::IncompleteData("no tomography register".into()))?;
            let mut d = SettingData::from_counts(s.clone(), counts)?;
            if let Some(cal) = &calibration {
                d.probs = mitigate(&d.probs, cal)?;
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let rho = reconstruct(OUTPUT.len(), &expectations_from_data(OUTPUT.len(), &data)?)?;
    let fidelity = rho.fidelity(&ideal_density(&spec.inputs))?;
    Ok(ExperimentResult {
        fidelity,
        reconstructed: Some(rho),
        status: PointStatus::Ok,
        ..base
    })
}
