//! Lévy flights: power-law tail density and Mantegna step sampling.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objective::Bounds;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("Lévy domain error: {0}")]
    DomainError(String),
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Tail exponent and base step length of a Lévy flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevyParams {
    pub lambda: f64,
    pub step_scale: f64,
}

impl Default for LevyParams {
    fn default() -> Self {
        Self { lambda: 1.5, step_scale: 5.0 }
    }
}

impl LevyParams {
    pub fn new(lambda: f64, step_scale: f64) -> Result<Self, LevyError> {
        let params = Self { lambda, step_scale };
        params.validate()?;
        Ok(params)
    }

    /// `λ ∈ (1, 3) \ {2}` and a positive step scale.
    pub fn validate(&self) -> Result<(), LevyError> {
        let l = self.lambda;
        if !(l > 1.0 && l < 3.0) || l == 2.0 {
            return Err(LevyError::DomainError(format!("lambda must lie in (1,2)∪(2,3), got {l}")));
        }
        if !(self.step_scale.is_finite() && self.step_scale > 0.0) {
            return Err(LevyError::DomainError(format!(
                "step_scale must be finite and > 0, got {}",
                self.step_scale
            )));
        }
        Ok(())
    }

    /// Mantegna numerator standard deviation
    /// `σ_u = [Γ(1+λ) sin(πλ/2) / (Γ((1+λ)/2) λ 2^((λ−1)/2))]^(1/λ)`.
    ///
    /// For `λ > 2` the sine is negative; its magnitude is used, which keeps
    /// the ratio's tail index at `λ`.
    pub fn mantegna_sigma(&self) -> f64 {
        let l = self.lambda;
        let num = gamma(1.0 + l) * (PI * l / 2.0).sin();
        let den = gamma((1.0 + l) / 2.0) * l * 2f64.powf((l - 1.0) / 2.0);
        (num / den).abs().powf(1.0 / l)
    }
}

/// Power-law density `λ Γ(λ) sin(πλ/2) / (π s^(1+λ))`.
///
/// Defined for `λ ∈ (1, 2)`; at `λ = 2` the expression vanishes and beyond it
/// turns negative, so both are rejected.
pub fn levy_density(step: f64, lambda: f64) -> Result<f64, LevyError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(LevyError::DomainError(format!("step must be finite and > 0, got {step}")));
    }
    if !(lambda > 1.0 && lambda < 2.0) {
        return Err(LevyError::DomainError(format!(
            "density requires lambda in (1, 2), got {lambda}"
        )));
    }
    Ok(lambda * gamma(lambda) * (PI * lambda / 2.0).sin() / (PI * step.powf(1.0 + lambda)))
}

/// One signed step `scale · u / |v|^(1/λ)`, `u ~ N(0, σ_u²)`, `v ~ N(0, 1)`.
pub fn sample_levy_step<R: Rng + ?Sized>(rng: &mut R, params: &LevyParams) -> f64 {
    let u: f64 = rng.sample::<f64, _>(StandardNormal) * params.mantegna_sigma();
    let v: f64 = rng.sample(StandardNormal);
    params.step_scale * u / v.abs().powf(1.0 / params.lambda)
}

/// Per-coordinate Lévy perturbation of every position, clamped to `bounds`.
///
/// The step scale is in normalized units: coordinate `i` moves by
/// `sample · (upper_i − lower_i) / 10`.
pub fn global_explore<R: Rng + ?Sized>(
    positions: &[Vec<f64>],
    bounds: &Bounds,
    params: &LevyParams,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    positions
        .iter()
        .map(|x| {
            x.iter()
                .enumerate()
                .map(|(i, &xi)| {
                    let step = sample_levy_step(rng, params) * bounds.width(i) / 10.0;
                    bounds.clamp_coord(i, xi + step)
                })
                .collect()
        })
        .collect()
}
