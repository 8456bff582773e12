use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{
    reference_model_dynamics, rk4_step, update_adaptive_gains, AdaptationParams,
    AdaptationSignals, AdaptiveGains, PidGains, Plant, ReferenceModelParams, SimError,
};
use crate::fmt::format_sig;
use crate::linalg::PMatrix;

/// Any state magnitude above this marks the run as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

pub const TRAJECTORY_HEADER: &str = "t,x1p,x2p,x1m,x2m,e_x,e_theta,u,kp,ki,kd,diverged";

/// Reference input `R(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Setpoint {
    Constant { value: f64 },
    Step { initial: f64, final_value: f64, at: f64 },
}

impl Setpoint {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Setpoint::Constant { value } => value,
            Setpoint::Step { initial, final_value, at } => {
                if t >= at {
                    final_value
                } else {
                    initial
                }
            }
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            Setpoint::Constant { value } => value.is_finite(),
            Setpoint::Step { initial, final_value, at } => {
                initial.is_finite() && final_value.is_finite() && at.is_finite()
            }
        }
    }
}

impl Default for Setpoint {
    fn default() -> Self {
        Setpoint::Constant { value: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Controller {
    /// `u = kp·ε + ki·∫ε dt + kd·dε/dt`.
    Pid(PidGains),
    /// `u = kp·ε − kd·x₂p` with Lyapunov-rule gain adaptation.
    Adaptive { gains: AdaptiveGains, params: AdaptationParams },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub horizon: f64,
    pub dt: f64,
    pub setpoint: Setpoint,
}

impl SimConfig {
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x1p: f64,
    pub x2p: f64,
    pub x1m: f64,
    pub x2m: f64,
    pub e_x: f64,
    pub e_theta: f64,
    pub u: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub diverged: bool,
}

impl TrajectoryLog {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for s in &self.samples {
            let cols = [s.t, s.x1p, s.x2p, s.x1m, s.x2m, s.e_x, s.e_theta, s.u, s.kp, s.ki, s.kd];
            for v in cols {
                write!(w, "{},", format_sig(v, 9))?;
            }
            writeln!(w, "{}", self.diverged)?;
        }
        Ok(())
    }
}

/// Largest admissible step: a tenth of the fastest plant or model time constant.
pub fn max_time_step(plant: &Plant, model: &ReferenceModelParams) -> f64 {
    plant.fastest_time_constant().min(1.0 / (model.zeta * model.omega_n)) / 10.0
}

/// Runs plant and reference model side by side from rest.
///
/// Both loops are sampled every `dt` and their inputs held over the step:
/// the plant receives the controller output computed from `ε = R − x₁p`, the
/// model receives its own position error `R − x₁m`, which is the realization
/// whose error-coordinate matrix is [`super::build_error_model`]. The
/// adaptive controller uses `P` for its update law; the PID ignores it.
pub fn simulate_closed_loop(
    plant: &Plant,
    model: &ReferenceModelParams,
    controller: &Controller,
    cfg: &SimConfig,
    p: &PMatrix,
) -> Result<TrajectoryLog, SimError> {
    plant.validate()?;
    model.validate()?;
    let limit = max_time_step(plant, model);
    if !(cfg.dt > 0.0) || cfg.dt > limit || !(cfg.horizon >= cfg.dt) {
        return Err(SimError::InvalidTimeStep { dt: cfg.dt, limit });
    }
    if !cfg.setpoint.is_finite() || !p.is_finite() {
        return Err(SimError::NonFinite("simulation inputs"));
    }
    match controller {
        Controller::Pid(g) if !g.is_finite() => return Err(SimError::NonFinite("PID gains")),
        Controller::Adaptive { gains, params } => {
            params.validate()?;
            if !(gains.kp.is_finite() && gains.kd.is_finite()) {
                return Err(SimError::NonFinite("adaptive gains"));
            }
        }
        _ => {}
    }

    let dt = cfg.dt;
    let steps = cfg.steps();
    let gain_product = plant.inverse_input_gain();
    let mut plant_state = [0.0; 2];
    let mut model_state = [0.0; 2];
    let mut controller = *controller;
    let mut integral = 0.0;
    let mut prev_eps: Option<f64> = None;
    let mut log = TrajectoryLog { dt, samples: Vec::with_capacity(steps + 1), diverged: false };

    for k in 0..=steps {
        let t = k as f64 * dt;
        let r = cfg.setpoint.at(t);
        let [x1p, x2p] = plant_state;
        let [x1m, x2m] = model_state;
        let eps = r - x1p;
        let (e_x, e_theta) = (x1p - x1m, x2p - x2m);

        let (u, gains) = match &mut controller {
            Controller::Pid(g) => {
                integral += eps * dt;
                let deriv = prev_eps.map_or(0.0, |prev| (eps - prev) / dt);
                prev_eps = Some(eps);
                (g.kp * eps + g.ki * integral + g.kd * deriv, (g.kp, g.ki, g.kd))
            }
            Controller::Adaptive { gains, params } => {
                let u = gains.kp * eps - gains.kd * x2p;
                let snapshot = (gains.kp, 0.0, gains.kd);
                // error in augmented coordinates: model minus plant of (ε, x₂)
                let signals = AdaptationSignals {
                    e1: e_x,
                    e2: -e_theta,
                    eps,
                    x2p,
                    gain_product,
                    dt,
                };
                match update_adaptive_gains(gains, params, p, &signals) {
                    Ok(next) => *gains = next,
                    Err(_) => log.diverged = true,
                }
                (u, snapshot)
            }
        };
        if !u.is_finite() {
            log.diverged = true;
        }
        log.samples.push(Sample {
            t,
            x1p,
            x2p,
            x1m,
            x2m,
            e_x,
            e_theta,
            u,
            kp: gains.0,
            ki: gains.1,
            kd: gains.2,
        });
        if log.diverged || k == steps {
            break;
        }

        let next_plant = rk4_step(|x, u| plant.derivatives(*x, u), plant_state, u, dt);
        let next_model =
            rk4_step(|x, v| reference_model_dynamics(model, *x, v), model_state, r - x1m, dt);
        match (next_plant, next_model) {
            (Ok(pn), Ok(mn)) => {
                plant_state = pn;
                model_state = mn;
            }
            _ => {
                log.diverged = true;
                break;
            }
        }
        let out_of_range = plant_state.iter().chain(&model_state).any(|v| v.abs() > DIVERGENCE_LIMIT);
        if out_of_range {
            log.diverged = true;
            break;
        }
    }
    Ok(log)
}
