use serde::{Deserialize, Serialize};

use super::{invalid, OptimError, UnitDraws};
use crate::objective::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoParams {
    /// Cognitive (personal-best) acceleration.
    pub c1: f64,
    /// Social (global-best) acceleration.
    pub c2: f64,
    /// Inertia weight.
    pub w: f64,
    pub population: usize,
    pub iterations: usize,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { c1: 2.0, c2: 2.0, w: 1.0, population: 30, iterations: 20 }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<(), OptimError> {
        for (field, v) in [("c1", self.c1), ("c2", self.c2), ("w", self.w)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.population < 2 {
            return Err(invalid("population", format!("must be >= 2, got {}", self.population)));
        }
        if self.iterations == 0 {
            return Err(invalid("iterations", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Cost at `position` when it was last evaluated.
    pub value: f64,
    pub pbest_position: Vec<f64>,
    pub pbest_value: f64,
}

impl Particle {
    /// A particle at rest whose personal best is its evaluated start point.
    pub fn at_rest(position: Vec<f64>, value: f64) -> Self {
        let dim = position.len();
        Self { pbest_position: position.clone(), pbest_value: value, velocity: vec![0.0; dim], position, value }
    }
}

/// One velocity/position update of every particle:
///
/// ```text
/// v ← w·v + c1·r1·(pbest − x) + c2·r2·(gbest − x)
/// x ← x + v
/// ```
///
/// `r1`, `r2` are drawn once per particle. Coordinates leaving the box are
/// clamped and their velocity component zeroed.
pub fn pso_step<D: UnitDraws + ?Sized>(
    swarm: &mut [Particle],
    gbest: &[f64],
    params: &PsoParams,
    bounds: &Bounds,
    draws: &mut D,
) {
    for p in swarm.iter_mut() {
        let r1 = draws.unit();
        let r2 = draws.unit();
        for (i, &g) in gbest.iter().enumerate().take(p.position.len()) {
            let x = p.position[i];
            let v = params.w * p.velocity[i]
                + params.c1 * r1 * (p.pbest_position[i] - x)
                + params.c2 * r2 * (g - x);
            let moved = x + v;
            let clamped = bounds.clamp_coord(i, moved);
            p.position[i] = clamped;
            p.velocity[i] = if clamped == moved { v } else { 0.0 };
        }
    }
}

/// Records `new_value` as the cost at the particle's position and replaces
/// the personal best only on strict improvement.
pub fn pso_accept(particle: &mut Particle, new_value: f64) {
    particle.value = new_value;
    if new_value < particle.pbest_value {
        particle.pbest_value = new_value;
        particle.pbest_position.clone_from(&particle.position);
    }
}
