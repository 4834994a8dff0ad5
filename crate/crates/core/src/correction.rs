//! Post-selected damping channel, ancilla-assisted correction, and their
//! closed-form success probabilities.
//!
//! The channel couples a system qubit to a fresh environment qubit with
//! [`GateKind::UG`] and keeps the run only when the environment reads `|0⟩`,
//! leaving `α|0⟩ + β√(1−γ)|1⟩` up to normalization. The correction rotates a
//! fresh ancilla by `H_θ`, entangles it with a CX from the system, and keeps
//! the run when the ancilla reads `|0⟩`, leaving `α cos θ|0⟩ + β√(1−γ) sin θ|1⟩`.
//! Choosing `cot θ = √(1−γ)` restores the input exactly.
//!
//! The correction only ever sees θ, never the true damping γ; θ is derived
//! from a guess `γ_g` via [`choose_theta`].

use num_complex::Complex64;

use crate::circuit::{CircuitOp, Clbit, Fragment, GateKind};
use crate::error::{Error, Result};
use crate::qmath::{c64, CVector};
use crate::tolerance;

/// True damping strength and the guess the correction is tuned for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub gamma: f64,
    pub gamma_guess: f64,
}

impl ChannelParams {
    pub fn new(gamma: f64, gamma_guess: f64) -> Result<Self> {
        check_gamma("gamma", gamma)?;
        check_gamma("gamma_guess", gamma_guess)?;
        Ok(ChannelParams { gamma, gamma_guess })
    }

    /// A guess of 1 has no usable correction angle.
    pub fn is_degenerate(&self) -> bool {
        self.gamma_guess == 1.0
    }
}

fn check_gamma(name: &str, g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::arg(format!("{name} = {g} outside [0, 1]")));
    }
    Ok(())
}

/// Amplitudes `α|0⟩ + β|1⟩` of a transmitted qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > tolerance::EXACT {
            return Err(Error::arg(format!("|α|² + |β|² = {norm}")));
        }
        Ok(QubitSpec { alpha, beta })
    }

    pub fn zero() -> Self {
        QubitSpec {
            alpha: c64(1.0, 0.0),
            beta: c64(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        QubitSpec {
            alpha: c64(0.0, 0.0),
            beta: c64(1.0, 0.0),
        }
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_vec(vec![self.alpha, self.beta])
    }
}

/// Correction angle θ ∈ (0, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionAngle(f64);

impl CorrectionAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::arg(format!(
                "correction angle {theta} outside (0, π/2]"
            )));
        }
        Ok(CorrectionAngle(theta))
    }

    /// Any real angle, for probing the analytics outside the tuned range.
    pub fn unchecked(theta: f64) -> Self {
        CorrectionAngle(theta)
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// `θ = arctan(1/√(1−γ_g))`, so that `cot θ = √(1−γ_g)`.
pub fn choose_theta(gamma_guess: f64) -> Result<CorrectionAngle> {
    check_gamma("gamma_guess", gamma_guess)?;
    if gamma_guess >= 1.0 {
        return Err(Error::DegenerateParameter(
            "gamma_guess = 1 drives cos θ to zero and erases the |0⟩ amplitude".into(),
        ));
    }
    CorrectionAngle::new((1.0 / (1.0 - gamma_guess).sqrt()).atan())
}

/// `[UG(γ) on (system, environment), PostSelect(environment → 0)]`.
pub fn channel_subcircuit(
    gamma: f64,
    system: usize,
    environment: usize,
    record: Option<Clbit>,
) -> Result<Fragment> {
    check_gamma("gamma", gamma)?;
    if system == environment {
        return Err(Error::Build {
            position: 0,
            reason: format!("channel system and environment are both qubit {system}"),
        });
    }
    Ok(vec![
        CircuitOp::gate(GateKind::UG(gamma), [system, environment]),
        CircuitOp::post_select(environment, 0, record),
    ])
}

/// `[H_θ on ancilla, CX(system → ancilla), PostSelect(ancilla → 0)]`.
pub fn correction_subcircuit(
    theta: CorrectionAngle,
    system: usize,
    ancilla: usize,
    record: Option<Clbit>,
) -> Result<Fragment> {
    if system == ancilla {
        return Err(Error::Build {
            position: 0,
            reason: format!("correction system and ancilla are both qubit {system}"),
        });
    }
    Ok(vec![
        CircuitOp::gate(GateKind::HTheta(theta.radians()), [ancilla]),
        CircuitOp::gate(GateKind::CX, [system, ancilla]),
        CircuitOp::post_select(ancilla, 0, record),
    ])
}

/// Channel survival probability `|α|² + |β|²(1−γ)`.
pub fn analytic_p1(q: &QubitSpec, gamma: f64) -> f64 {
    q.alpha.norm_sqr() + q.beta.norm_sqr() * (1.0 - gamma)
}

/// Correction survival probability, conditioned on channel survival.
pub fn analytic_p2(q: &QubitSpec, gamma: f64, theta: CorrectionAngle) -> Result<f64> {
    let p1 = analytic_p1(q, gamma);
    if p1 < tolerance::IMPOSSIBLE_BRANCH {
        return Err(Error::DegenerateParameter(format!(
            "channel survival probability is {p1:e}"
        )));
    }
    let (s, c) = theta.radians().sin_cos();
    Ok(((q.alpha * c).norm_sqr() + (q.beta * s).norm_sqr() * (1.0 - gamma)) / p1)
}

/// Normalized state left by the channel alone.
pub fn channel_output(q: &QubitSpec, gamma: f64) -> Result<QubitSpec> {
    let p1 = analytic_p1(q, gamma);
    if p1 < tolerance::IMPOSSIBLE_BRANCH {
        return Err(Error::DegenerateParameter(format!(
            "channel survival probability is {p1:e}"
        )));
    }
    let n = p1.sqrt();
    Ok(QubitSpec {
        alpha: q.alpha / n,
        beta: q.beta * (1.0 - gamma).sqrt() / n,
    })
}

/// Normalized state left by channel followed by correction.
pub fn corrected_state(q: &QubitSpec, gamma: f64, theta: CorrectionAngle) -> Result<QubitSpec> {
    let (s, c) = theta.radians().sin_cos();
    let alpha = q.alpha * c;
    let beta = q.beta * (1.0 - gamma).sqrt() * s;
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if norm * norm < tolerance::IMPOSSIBLE_BRANCH {
        return Err(Error::DegenerateParameter(
            "correction leaves no surviving amplitude".into(),
        ));
    }
    Ok(QubitSpec {
        alpha: alpha / norm,
        beta: beta / norm,
    })
}

/// Probability that both corrections succeed given both channels survived:
/// the product of `p₂` for each corrected qubit.
pub fn overall_success(
    q_control: &QubitSpec,
    q_signal: &QubitSpec,
    gamma: f64,
    gamma_guess: f64,
) -> Result<f64> {
    let theta = choose_theta(gamma_guess)?;
    Ok(analytic_p2(q_control, gamma, theta)? * analytic_p2(q_signal, gamma, theta)?)
}
