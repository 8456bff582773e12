//! Continuous-time plant and reference-model dynamics, the controllers that
//! drive them, and closed-loop simulation.

mod integrator;
mod sim;

pub use integrator::rk4_step;
pub use sim::{
    max_time_step, simulate_closed_loop, Controller, Sample, Setpoint, SimConfig, TrajectoryLog,
    DIVERGENCE_LIMIT, TRAJECTORY_HEADER,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Matrix2, PMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("time step {dt} violates the stability guard (must be in (0, {limit}])")]
    InvalidTimeStep { dt: f64, limit: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

fn require_positive(name: &'static str, v: f64) -> Result<(), SimError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidParameter { name, reason: format!("must be finite and > 0, got {v}") })
    }
}

/// Physical constants of a brushless DC motor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotorParams {
    /// Back-EMF constant (V·s/rad).
    pub ke: f64,
    /// Torque constant (N·m/A).
    pub kt: f64,
    /// Armature resistance (Ω).
    pub ra: f64,
    /// Armature inductance (H).
    pub la: f64,
    /// Rotor inertia (kg·m²).
    pub j: f64,
    /// Viscous friction (N·m·s/rad).
    pub b: f64,
}

impl Default for MotorParams {
    /// A small machine with τ_m = 0.1 s and τ_e = 5 ms.
    fn default() -> Self {
        Self { ke: 0.05, kt: 0.05, ra: 1.0, la: 0.005, j: 2.5e-4, b: 1e-4 }
    }
}

impl MotorParams {
    pub fn validate(&self) -> Result<(), SimError> {
        require_positive("ke", self.ke)?;
        require_positive("kt", self.kt)?;
        require_positive("ra", self.ra)?;
        require_positive("la", self.la)?;
        require_positive("j", self.j)?;
        require_positive("b", self.b)
    }

    /// Mechanical and electrical time constants `(τ_m, τ_e)` in seconds.
    pub fn time_constants(&self) -> (f64, f64) {
        motor_time_constants(self)
    }
}

pub fn motor_time_constants(p: &MotorParams) -> (f64, f64) {
    (p.ra * p.j / (p.ke * p.kt), p.la / p.ra)
}

/// Speed dynamics `τ_m τ_e ÿ + τ_m ẏ + y = u / K_e`.
///
/// Returns `(ẏ, ÿ)` for the state `(y, ẏ)` under input voltage `u`.
pub fn bldc_dynamics(p: &MotorParams, state: [f64; 2], u: f64) -> [f64; 2] {
    let (tau_m, tau_e) = motor_time_constants(p);
    let [y, ydot] = state;
    [ydot, (u / p.ke - tau_m * ydot - y) / (tau_m * tau_e)]
}

/// Second-order reference model `ω_n² / (s² + 2ζω_n s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceModelParams {
    pub omega_n: f64,
    pub zeta: f64,
}

impl Default for ReferenceModelParams {
    fn default() -> Self {
        Self { omega_n: 10.0, zeta: 0.7 }
    }
}

impl ReferenceModelParams {
    pub fn validate(&self) -> Result<(), SimError> {
        require_positive("omega_n", self.omega_n)?;
        require_positive("zeta", self.zeta)
    }
}

pub fn reference_model_dynamics(m: &ReferenceModelParams, state: [f64; 2], input: f64) -> [f64; 2] {
    let x2m = state[1];
    [x2m, m.omega_n * m.omega_n * input - 2.0 * m.zeta * m.omega_n * x2m]
}

/// State matrix of the model written in error coordinates `(ε, x₂)` with
/// `ε = R − x₁`.
pub fn build_error_model(m: &ReferenceModelParams) -> Matrix2 {
    Matrix2::new(0.0, -1.0, m.omega_n * m.omega_n, -2.0 * m.zeta * m.omega_n)
}

/// Generic plant `b_p / (s² + a_p s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericPlantParams {
    pub a_p: f64,
    pub b_p: f64,
}

impl GenericPlantParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.a_p.is_finite() {
            return Err(SimError::InvalidParameter { name: "a_p", reason: "must be finite".into() });
        }
        if !self.b_p.is_finite() || self.b_p == 0.0 {
            return Err(SimError::InvalidParameter {
                name: "b_p",
                reason: "must be finite and nonzero".into(),
            });
        }
        Ok(())
    }

    /// The plant that exactly reproduces a reference model.
    pub fn matching(m: &ReferenceModelParams) -> Self {
        Self { a_p: 2.0 * m.zeta * m.omega_n, b_p: m.omega_n * m.omega_n }
    }
}

pub fn generic_plant_dynamics(p: &GenericPlantParams, state: [f64; 2], u: f64) -> [f64; 2] {
    [state[1], p.b_p * u - p.a_p * state[1]]
}

/// Plant under control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plant {
    Bldc(MotorParams),
    Generic(GenericPlantParams),
}

impl Plant {
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            Plant::Bldc(p) => p.validate(),
            Plant::Generic(p) => p.validate(),
        }
    }

    pub fn derivatives(&self, state: [f64; 2], u: f64) -> [f64; 2] {
        match self {
            Plant::Bldc(p) => bldc_dynamics(p, state, u),
            Plant::Generic(p) => generic_plant_dynamics(p, state, u),
        }
    }

    /// Fastest plant time constant, used by the step-size guard.
    pub fn fastest_time_constant(&self) -> f64 {
        match self {
            Plant::Bldc(p) => {
                let (tau_m, tau_e) = p.time_constants();
                tau_m.min(tau_e)
            }
            Plant::Generic(p) if p.a_p != 0.0 => 1.0 / p.a_p.abs(),
            Plant::Generic(_) => f64::INFINITY,
        }
    }

    /// Reciprocal of the input gain on the acceleration channel
    /// (`K_e τ_m τ_e` for the motor, `1 / b_p` for the generic plant).
    pub fn inverse_input_gain(&self) -> f64 {
        match self {
            Plant::Bldc(p) => {
                let (tau_m, tau_e) = p.time_constants();
                p.ke * tau_m * tau_e
            }
            Plant::Generic(p) => 1.0 / p.b_p,
        }
    }
}

/// Fixed PID gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub const fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }

    pub fn is_finite(&self) -> bool {
        self.kp.is_finite() && self.ki.is_finite() && self.kd.is_finite()
    }

    pub fn from_slice(x: &[f64]) -> Option<Self> {
        match *x {
            [kp, ki, kd] => Some(Self::new(kp, ki, kd)),
            _ => None,
        }
    }
}

/// Gains of the `u = K_p ε − K_d x₂p` law, adapted online.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveGains {
    pub kp: f64,
    pub kd: f64,
    pub kp0: f64,
    pub kd0: f64,
    pub integral_state_p: f64,
    pub integral_state_d: f64,
}

impl AdaptiveGains {
    pub const fn new(kp0: f64, kd0: f64) -> Self {
        Self { kp: kp0, kd: kd0, kp0, kd0, integral_state_p: 0.0, integral_state_d: 0.0 }
    }
}

/// Adaptation-rate denominators α₂₁, α₂₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationParams {
    pub alpha21: f64,
    pub alpha22: f64,
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<(), SimError> {
        require_positive("alpha21", self.alpha21)?;
        require_positive("alpha22", self.alpha22)
    }
}

/// Inputs to one adaptation step.
#[derive(Debug, Clone, Copy)]
pub struct AdaptationSignals {
    pub e1: f64,
    pub e2: f64,
    /// `ε = R − x₁p`.
    pub eps: f64,
    pub x2p: f64,
    /// `K_e τ_m τ_e`, see [`Plant::inverse_input_gain`].
    pub gain_product: f64,
    pub dt: f64,
}

/// Advances both gain integrals by one explicit-Euler step of
/// `(P₂₁e₁ + P₂₂e₂)·ε` and `(P₂₁e₁ + P₂₂e₂)·x₂p`.
pub fn update_adaptive_gains(
    g: &AdaptiveGains,
    a: &AdaptationParams,
    p: &PMatrix,
    s: &AdaptationSignals,
) -> Result<AdaptiveGains, SimError> {
    let inputs = [s.e1, s.e2, s.eps, s.x2p, s.gain_product, s.dt, g.kp0, g.kd0];
    if !inputs.iter().all(|v| v.is_finite()) || !p.is_finite() {
        return Err(SimError::NonFinite("adaptive gain inputs"));
    }
    if !(s.dt > 0.0) {
        return Err(SimError::InvalidTimeStep { dt: s.dt, limit: f64::INFINITY });
    }
    let sigma = p.p21() * s.e1 + p.p22 * s.e2;
    let integral_state_p = g.integral_state_p + sigma * s.eps * s.dt;
    let integral_state_d = g.integral_state_d + sigma * s.x2p * s.dt;
    let next = AdaptiveGains {
        kp: g.kp0 + s.gain_product / a.alpha21 * integral_state_p,
        kd: g.kd0 - s.gain_product / a.alpha22 * integral_state_d,
        integral_state_p,
        integral_state_d,
        ..*g
    };
    if next.kp.is_finite() && next.kd.is_finite() {
        Ok(next)
    } else {
        Err(SimError::NonFinite("adaptive gains"))
    }
}
