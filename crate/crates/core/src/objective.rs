//! Objective functions: the Lyapunov-weighted tracking cost for the motor
//! benchmark and analytic test functions for validating the optimizers.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{is_positive_definite, solve_lyapunov, LyapunovError, Matrix2, PMatrix};
use crate::plant::{
    build_error_model, simulate_closed_loop, Controller, PidGains, Plant, ReferenceModelParams,
    Setpoint, SimConfig, SimError, TrajectoryLog,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("unknown objective name {0:?}")]
    UnknownName(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid objective spec field {field}: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

/// Closed box `[lower_i, upper_i]` per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ObjectiveError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(ObjectiveError::InvalidBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ObjectiveError::InvalidBounds(format!(
                    "coordinate {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every coordinate.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, ObjectiveError> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn clamp_coord(&self, i: usize, v: f64) -> f64 {
        v.clamp(self.lower[i], self.upper[i])
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = self.clamp_coord(i, *v);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(i, v)| (self.lower[i]..=self.upper[i]).contains(v))
    }
}

type Evaluator = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named, box-bounded cost function with an evaluation counter.
pub struct ObjectiveFunction {
    name: String,
    bounds: Bounds,
    evaluator: Evaluator,
    evaluations: AtomicU64,
}

impl fmt::Debug for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("evaluations", &self.evaluations())
            .finish()
    }
}

impl ObjectiveFunction {
    pub fn new<F>(name: impl Into<String>, bounds: Bounds, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { name: name.into(), bounds, evaluator: Box::new(evaluator), evaluations: AtomicU64::new(0) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dim()
    }

    /// Evaluates the cost at `x`, counting the call.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.evaluator)(x)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkName {
    Sphere,
    Rosenbrock,
    Rastrigin,
}

impl BenchmarkName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkName::Sphere => "sphere",
            BenchmarkName::Rosenbrock => "rosenbrock",
            BenchmarkName::Rastrigin => "rastrigin",
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BenchmarkName::Sphere => sphere(x),
            BenchmarkName::Rosenbrock => rosenbrock(x),
            BenchmarkName::Rastrigin => rastrigin(x),
        }
    }
}

impl FromStr for BenchmarkName {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sphere" => Ok(BenchmarkName::Sphere),
            "rosenbrock" => Ok(BenchmarkName::Rosenbrock),
            "rastrigin" => Ok(BenchmarkName::Rastrigin),
            other => Err(ObjectiveError::UnknownName(other.to_string())),
        }
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

pub fn make_benchmark(name: &str, n: usize, bounds: Bounds) -> Result<ObjectiveFunction, ObjectiveError> {
    let which: BenchmarkName = name.parse()?;
    if n == 0 || bounds.dim() != n {
        return Err(ObjectiveError::InvalidBounds(format!(
            "dimension {n} does not match bounds of dimension {}",
            bounds.dim()
        )));
    }
    Ok(ObjectiveFunction::new(which.as_str(), bounds, move |x| which.eval(x)))
}

/// `eᵀPe + Σ αᵢaᵢ² + Σ βᵢbᵢ²`.
pub fn instant_cost(
    e: [f64; 2],
    p: &PMatrix,
    a: &[f64],
    b: &[f64],
    alpha_w: &[f64],
    beta_w: &[f64],
) -> Result<f64, ObjectiveError> {
    let weighted = |dev: &[f64], w: &[f64]| -> f64 { dev.iter().zip(w).map(|(d, w)| w * d * d).sum() };
    let value = p.quadratic_form(e) + weighted(a, alpha_w) + weighted(b, beta_w);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ObjectiveError::NonFinite("instant cost"))
    }
}

/// Nominal gains the deviation penalties are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalGains {
    pub kp: f64,
    pub kd: f64,
}

/// Configuration of the Lyapunov tracking objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovObjectiveSpec {
    /// Row-major weight matrix of the Lyapunov solve.
    pub q: [[f64; 2]; 2],
    /// Weight on the proportional-gain deviation.
    pub alpha_w: f64,
    /// Weight on the derivative-gain deviation.
    pub beta_w: f64,
    pub horizon: f64,
    pub dt: f64,
    pub setpoint: Setpoint,
    /// Cost reported for diverged or otherwise failed simulations.
    pub divergence_penalty: f64,
    pub nominal: NominalGains,
}

impl Default for LyapunovObjectiveSpec {
    fn default() -> Self {
        Self {
            q: Matrix2::identity().m,
            alpha_w: 0.0,
            beta_w: 0.0,
            horizon: 2.0,
            dt: 2e-4,
            setpoint: Setpoint::default(),
            divergence_penalty: 1000.0,
            nominal: NominalGains { kp: 1.0, kd: 0.0 },
        }
    }
}

impl LyapunovObjectiveSpec {
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        let q = Matrix2 { m: self.q };
        let spd = q.is_finite()
            && q.is_symmetric()
            && is_positive_definite(&PMatrix::new(q.m[0][0], q.m[0][1], q.m[1][1]));
        if !spd {
            return Err(invalid("q", "must be symmetric positive definite"));
        }
        for (field, w) in [("alpha_w", self.alpha_w), ("beta_w", self.beta_w)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(invalid(field, "must be finite and >= 0"));
            }
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid("horizon", "must be > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(invalid("dt", "must be in (0, horizon]"));
        }
        if !(self.divergence_penalty.is_finite() && self.divergence_penalty > 0.0) {
            return Err(invalid("divergence_penalty", "must be > 0"));
        }
        if !(self.nominal.kp.is_finite() && self.nominal.kd.is_finite()) {
            return Err(invalid("nominal", "gains must be finite"));
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig { horizon: self.horizon, dt: self.dt, setpoint: self.setpoint }
    }
}

fn invalid(field: &'static str, reason: &str) -> ObjectiveError {
    ObjectiveError::InvalidSpec { field, reason: reason.to_string() }
}

/// Precomputed tracking problem: the Lyapunov weight is solved once and
/// reused for every candidate.
#[derive(Debug, Clone)]
pub struct TrackingProblem {
    spec: LyapunovObjectiveSpec,
    plant: Plant,
    model: ReferenceModelParams,
    p: PMatrix,
}

impl TrackingProblem {
    pub fn new(
        spec: LyapunovObjectiveSpec,
        plant: Plant,
        model: ReferenceModelParams,
    ) -> Result<Self, ObjectiveError> {
        spec.validate()?;
        plant.validate()?;
        model.validate()?;
        let limit = crate::plant::max_time_step(&plant, &model);
        if spec.dt > limit {
            return Err(SimError::InvalidTimeStep { dt: spec.dt, limit }.into());
        }
        let p = solve_lyapunov(&build_error_model(&model), &Matrix2 { m: spec.q })?;
        Ok(Self { spec, plant, model, p })
    }

    pub fn spec(&self) -> &LyapunovObjectiveSpec {
        &self.spec
    }

    pub fn p_matrix(&self) -> &PMatrix {
        &self.p
    }

    pub fn simulate(&self, candidate: &PidGains) -> Result<TrajectoryLog, ObjectiveError> {
        Ok(simulate_closed_loop(
            &self.plant,
            &self.model,
            &Controller::Pid(*candidate),
            &self.spec.sim_config(),
            &self.p,
        )?)
    }

    /// Rectangle-rule integral of the instant cost over the horizon, or the
    /// divergence penalty when the closed loop blows up.
    pub fn evaluate(&self, candidate: &PidGains) -> Result<f64, ObjectiveError> {
        if !candidate.is_finite() {
            return Err(ObjectiveError::NonFinite("candidate gains"));
        }
        let log = self.simulate(candidate)?;
        if log.diverged {
            return Ok(self.spec.divergence_penalty);
        }
        let a = [candidate.kp - self.spec.nominal.kp];
        let b = [candidate.kd - self.spec.nominal.kd];
        let (aw, bw) = ([self.spec.alpha_w], [self.spec.beta_w]);
        let intervals = log.samples.len().saturating_sub(1);
        let mut total = 0.0;
        for s in &log.samples[..intervals] {
            total += instant_cost([s.e_x, s.e_theta], &self.p, &a, &b, &aw, &bw)?;
        }
        let value = total * log.dt;
        Ok(if value.is_finite() { value } else { self.spec.divergence_penalty })
    }

    /// Wraps the problem as a 3-dimensional `(kp, ki, kd)` objective. Failed
    /// evaluations score the divergence penalty.
    pub fn into_objective(self, bounds: Bounds) -> Result<ObjectiveFunction, ObjectiveError> {
        if bounds.dim() != 3 {
            return Err(ObjectiveError::InvalidBounds(format!(
                "PID tuning needs 3 coordinates, got {}",
                bounds.dim()
            )));
        }
        let penalty = self.spec.divergence_penalty;
        Ok(ObjectiveFunction::new("bldc-pid", bounds, move |x| {
            PidGains::from_slice(x)
                .and_then(|g| self.evaluate(&g).ok())
                .unwrap_or(penalty)
        }))
    }
}

pub fn tracking_objective(
    spec: &LyapunovObjectiveSpec,
    plant: &Plant,
    model: &ReferenceModelParams,
    candidate: &PidGains,
) -> Result<f64, ObjectiveError> {
    TrackingProblem::new(spec.clone(), *plant, *model)?.evaluate(candidate)
}
