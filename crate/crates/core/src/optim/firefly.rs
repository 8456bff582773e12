use serde::{Deserialize, Serialize};

use super::{invalid, OptimError, UnitDraws};
use crate::objective::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FireflyParams {
    /// Attractiveness at zero distance.
    pub beta0: f64,
    /// Light absorption coefficient.
    pub gamma: f64,
    /// Random-walk weight.
    pub alpha: f64,
    pub population: usize,
    pub iterations: usize,
}

impl Default for FireflyParams {
    fn default() -> Self {
        Self { beta0: 0.2, gamma: 1.0, alpha: 0.3, population: 30, iterations: 20 }
    }
}

impl FireflyParams {
    pub fn validate(&self) -> Result<(), OptimError> {
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return Err(invalid("beta0", format!("must be finite and > 0, got {}", self.beta0)));
        }
        if !(self.gamma >= 0.0) {
            return Err(invalid("gamma", format!("must be >= 0, got {}", self.gamma)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(invalid("alpha", format!("must be finite and >= 0, got {}", self.alpha)));
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

/// A firefly; lower cost means brighter.
#[derive(Debug, Clone, PartialEq)]
pub struct FireflyAgent {
    pub position: Vec<f64>,
    pub value: f64,
}

/// Movement sweep of one generation, without evaluation.
///
/// Agents are processed in index order and see earlier agents' updated
/// positions. Agent `i` moves once towards every `j` that was brighter at the
/// start of the generation:
///
/// ```text
/// x_i ← x_i + β0·exp(−γ·r_ij²)·(x_j − x_i) + α·(r − ½)
/// ```
///
/// with a fresh `r ~ U(0,1)` per coordinate per move. An agent with no brighter
/// peer takes only the random term. Distances and the random term are measured
/// in units of a tenth of each coordinate's range, so a box of width 10 uses
/// the coefficients literally.
pub fn firefly_move<D: UnitDraws + ?Sized>(
    agents: &[FireflyAgent],
    params: &FireflyParams,
    bounds: &Bounds,
    draws: &mut D,
) -> Vec<Vec<f64>> {
    let dim = bounds.dim();
    let unit: Vec<f64> = (0..dim).map(|i| bounds.width(i) / 10.0).collect();
    let mut positions: Vec<Vec<f64>> = agents.iter().map(|a| a.position.clone()).collect();

    for i in 0..agents.len() {
        let mut moved = false;
        for j in 0..agents.len() {
            if agents[j].value < agents[i].value {
                let r2: f64 = (0..dim)
                    .map(|k| ((positions[j][k] - positions[i][k]) / unit[k]).powi(2))
                    .sum();
                let beta = params.beta0 * (-params.gamma * r2).exp();
                for k in 0..dim {
                    let pull = beta * (positions[j][k] - positions[i][k]);
                    let walk = params.alpha * (draws.unit() - 0.5) * unit[k];
                    positions[i][k] = bounds.clamp_coord(k, positions[i][k] + pull + walk);
                }
                moved = true;
            }
        }
        if !moved {
            for (k, x) in positions[i].iter_mut().enumerate() {
                *x = bounds.clamp_coord(k, *x + params.alpha * (draws.unit() - 0.5) * unit[k]);
            }
        }
    }
    positions
}

/// Moves the population and re-evaluates every moved agent. `eval` returning
/// `None` (budget exhausted) leaves that agent as it was.
pub fn firefly_step<D, E>(
    agents: &[FireflyAgent],
    params: &FireflyParams,
    bounds: &Bounds,
    draws: &mut D,
    mut eval: E,
) -> Vec<FireflyAgent>
where
    D: UnitDraws + ?Sized,
    E: FnMut(&[f64]) -> Option<f64>,
{
    firefly_move(agents, params, bounds, draws)
        .into_iter()
        .zip(agents)
        .map(|(position, prev)| match eval(&position) {
            Some(value) => FireflyAgent { position, value },
            None => prev.clone(),
        })
        .collect()
}

/// Keeps the new agent only if it is strictly brighter.
pub fn firefly_accept(prev: FireflyAgent, new: FireflyAgent) -> FireflyAgent {
    if new.value < prev.value {
        new
    } else {
        prev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::testing::FixedDraws;

    fn agent(x: &[f64], value: f64) -> FireflyAgent {
        FireflyAgent { position: x.to_vec(), value }
    }

    fn literal_box(dim: usize) -> Bounds {
        Bounds::uniform(dim, -5.0, 5.0).unwrap()
    }

    #[test]
    fn hand_evaluated_attraction() {
        let params = FireflyParams { beta0: 0.2, gamma: 1.0, alpha: 0.0, ..Default::default() };
        let agents = [agent(&[0.0], 2.0), agent(&[1.0], 1.0)];
        let mut draws = FixedDraws::new(&[0.9, 0.1]);
        let moved = firefly_move(&agents, &params, &literal_box(1), &mut draws);
        let want = 0.2 * (-1.0f64).exp();
        assert!((moved[0][0] - want).abs() < 1e-12);
        assert!((moved[0][0] - 0.0735759).abs() < 1e-7);
        // the brightest agent only takes the (here zero-weight) random walk
        assert_eq!(moved[1], vec![1.0]);
    }

    #[test]
    fn random_walk_term() {
        let params = FireflyParams { beta0: 0.2, gamma: 1.0, alpha: 0.3, ..Default::default() };
        let agents = [agent(&[0.0, 0.0], 1.0)];
        let moved = firefly_move(&agents, &params, &literal_box(2), &mut FixedDraws::new(&[1.0, 0.0]));
        assert!((moved[0][0] - 0.15).abs() < 1e-12);
        assert!((moved[0][1] + 0.15).abs() < 1e-12);
        // same move in a box twice as wide is twice as long
        let wide = Bounds::uniform(2, -10.0, 10.0).unwrap();
        let moved = firefly_move(&agents, &params, &wide, &mut FixedDraws::new(&[1.0, 0.0]));
        assert!((moved[0][0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn coincident_agents_do_not_move() {
        let params = FireflyParams { alpha: 0.0, ..Default::default() };
        let agents = [agent(&[1.0, 2.0], 3.0), agent(&[1.0, 2.0], 1.0)];
        let moved = firefly_move(&agents, &params, &literal_box(2), &mut FixedDraws::new(&[0.5; 4]));
        assert_eq!(moved, vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn strong_absorption_freezes_attraction() {
        let params = FireflyParams { alpha: 0.0, gamma: 1e6, ..Default::default() };
        let agents = [agent(&[0.0], 2.0), agent(&[1.0], 1.0)];
        let moved = firefly_move(&agents, &params, &literal_box(1), &mut FixedDraws::new(&[0.5; 2]));
        assert_eq!(moved, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn asynchronous_sweep_uses_updated_positions() {
        // agent 0 moves towards 2 before agent 1 measures its distance to 0
        let params = FireflyParams { beta0: 0.5, gamma: 0.0, alpha: 0.0, ..Default::default() };
        let agents = [agent(&[0.0], 2.0), agent(&[4.0], 3.0), agent(&[2.0], 1.0)];
        let moved = firefly_move(&agents, &params, &literal_box(1), &mut FixedDraws::new(&[0.5; 4]));
        assert_eq!(moved[0], vec![1.0]);
        // towards 0 (now at 1): 4 + 0.5·(1 − 4) = 2.5, then towards 2: 2.5 + 0.5·(2 − 2.5)
        assert_eq!(moved[1], vec![2.25]);
        assert_eq!(moved[2], vec![2.0]);
    }

    #[test]
    fn step_reverts_unevaluated_agents() {
        let params = FireflyParams { alpha: 0.0, ..Default::default() };
        let agents = vec![agent(&[0.0], 2.0), agent(&[1.0], 1.0), agent(&[3.0], 5.0)];
        let mut left = 2;
        let out = firefly_step(&agents, &params, &literal_box(1), &mut FixedDraws::new(&[0.5; 4]), |x| {
            if left == 0 {
                return None;
            }
            left -= 1;
            Some(x[0] * x[0])
        });
        assert_eq!(out[2], agents[2]);
        assert_eq!(out[0].value, out[0].position[0].powi(2));
    }

    #[test]
    fn acceptance_is_strict() {
        let old = agent(&[0.0], 1.0);
        assert_eq!(firefly_accept(old.clone(), agent(&[1.0], 0.5)).position, vec![1.0]);
        assert_eq!(firefly_accept(old.clone(), agent(&[1.0], 1.0)).position, vec![0.0]);
        assert_eq!(firefly_accept(old.clone(), agent(&[1.0], 2.0)).position, vec![0.0]);
    }

    #[test]
    fn parameter_validation() {
        assert!(FireflyParams::default().validate().is_ok());
        let err = FireflyParams { population: 1, ..Default::default() }.validate().unwrap_err();
        assert!(err.to_string().contains("population"));
        assert!(FireflyParams { beta0: 0.0, ..Default::default() }.validate().is_err());
    }
}
