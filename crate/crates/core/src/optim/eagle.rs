use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::firefly::{firefly_accept, firefly_step, FireflyAgent};
use super::pso::{pso_accept, pso_step, Particle};
use super::{
    check_budget, random_point, Budget, EagleConfig, LocalSearch, OptimError, RunResult,
    Termination,
};
use crate::levy::global_explore;
use crate::objective::ObjectiveFunction;

/// Consecutive non-improving local iterations that end a local stage early.
const LOCAL_STALL_ITERATIONS: usize = 2;

enum Population {
    Swarm(Vec<Particle>),
    Fireflies(Vec<FireflyAgent>),
}

impl Population {
    /// Uniform random start, evaluated in index order.
    fn initialize(local: &LocalSearch, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng) -> Self {
        let bounds = budget.bounds();
        let mut points = Vec::with_capacity(local.population());
        for _ in 0..local.population() {
            let x = random_point(bounds, rng);
            let value = budget.eval(&x).expect("budget checked against population size");
            points.push((x, value));
        }
        match local {
            LocalSearch::Pso(_) => {
                Population::Swarm(points.into_iter().map(|(x, v)| Particle::at_rest(x, v)).collect())
            }
            LocalSearch::Firefly(_) => Population::Fireflies(
                points.into_iter().map(|(position, value)| FireflyAgent { position, value }).collect(),
            ),
        }
    }

    fn positions(&self) -> Vec<Vec<f64>> {
        match self {
            Population::Swarm(s) => s.iter().map(|p| p.position.clone()).collect(),
            Population::Fireflies(f) => f.iter().map(|a| a.position.clone()).collect(),
        }
    }

    /// Evaluates Lévy proposals and moves each agent whose proposal is
    /// strictly better than its current cost.
    fn adopt(&mut self, proposals: Vec<Vec<f64>>, budget: &mut Budget<'_>) {
        for (i, x) in proposals.into_iter().enumerate() {
            let Some(value) = budget.eval(&x) else { return };
            match self {
                Population::Swarm(s) => {
                    let p = &mut s[i];
                    if value < p.value {
                        p.position = x;
                        pso_accept(p, value);
                    }
                }
                Population::Fireflies(f) => {
                    let candidate = FireflyAgent { position: x, value };
                    f[i] = firefly_accept(f[i].clone(), candidate);
                }
            }
        }
    }

    fn reset_velocities(&mut self) {
        if let Population::Swarm(s) = self {
            for p in s.iter_mut() {
                p.velocity.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }

    /// One generation of the local algorithm.
    fn local_iteration(&mut self, local: &LocalSearch, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng) {
        let bounds = budget.bounds();
        match (self, local) {
            (Population::Swarm(swarm), LocalSearch::Pso(params)) => {
                let gbest = budget.best_position().to_vec();
                pso_step(swarm, &gbest, params, bounds, rng);
                for p in swarm.iter_mut() {
                    let Some(value) = budget.eval(&p.position) else { return };
                    pso_accept(p, value);
                }
            }
            (Population::Fireflies(agents), LocalSearch::Firefly(params)) => {
                let moved = firefly_step(agents, params, bounds, rng, |x| budget.eval(x));
                let prev = std::mem::take(agents);
                *agents = prev.into_iter().zip(moved).map(|(a, b)| firefly_accept(a, b)).collect();
            }
            _ => unreachable!("population kind always matches its local search"),
        }
    }
}

/// Two-stage Eagle Strategy.
///
/// After a uniform random start, each cycle runs one round of Lévy-flight
/// proposals (one per agent, adopted on improvement) followed by
/// [`EagleConfig::local_iterations_per_cycle`] generations of the local
/// algorithm, cut short after two generations without a new best. PSO
/// velocities restart from zero at every local stage and the swarm follows
/// the best point found so far, exploration included. The run ends when the
/// budget is spent or when two consecutive cycles each improve the best value
/// by less than `tolerance`.
pub fn eagle_strategy_run(
    objective: &ObjectiveFunction,
    config: &EagleConfig,
) -> Result<RunResult, OptimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut budget = Budget::new(objective, config.eval_budget);
    let mut population = Population::initialize(&config.local, &mut budget, &mut rng);
    budget.record();

    let local_cap = config.local_iterations_per_cycle();
    let mut stalled_cycles = 0;
    loop {
        if budget.exhausted() {
            return Ok(budget.finish(Termination::Budget));
        }
        let cycle_start = budget.best_value();

        let proposals = global_explore(&population.positions(), budget.bounds(), &config.levy, &mut rng);
        population.adopt(proposals, &mut budget);
        budget.record();

        population.reset_velocities();
        let mut stall = 0;
        for _ in 0..local_cap {
            if budget.exhausted() {
                break;
            }
            let before = budget.best_value();
            population.local_iteration(&config.local, &mut budget, &mut rng);
            budget.record();
            stall = if budget.best_value() < before { 0 } else { stall + 1 };
            if stall >= LOCAL_STALL_ITERATIONS {
                break;
            }
        }

        let improvement = cycle_start - budget.best_value();
        stalled_cycles = if improvement < config.tolerance { stalled_cycles + 1 } else { 0 };
        if stalled_cycles >= 2 {
            return Ok(budget.finish(Termination::Tolerance));
        }
    }
}

/// The local algorithm alone from a uniform random start, iterated until the
/// evaluation budget is spent.
pub fn plain_run(
    local: &LocalSearch,
    objective: &ObjectiveFunction,
    eval_budget: u64,
    seed: u64,
) -> Result<RunResult, OptimError> {
    local.validate()?;
    check_budget(eval_budget, local.population())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut budget = Budget::new(objective, eval_budget);
    let mut population = Population::initialize(local, &mut budget, &mut rng);
    budget.record();
    while !budget.exhausted() {
        population.local_iteration(local, &mut budget, &mut rng);
        budget.record();
    }
    Ok(budget.finish(Termination::Budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{make_benchmark, Bounds};
    use crate::optim::{FireflyParams, PsoParams};

    fn sphere2() -> ObjectiveFunction {
        make_benchmark("sphere", 2, Bounds::uniform(2, -5.0, 5.0).unwrap()).unwrap()
    }

    #[test]
    fn constant_objective_stops_on_tolerance() {
        for local in [LocalSearch::Pso(PsoParams::default()), LocalSearch::Firefly(FireflyParams::default())] {
            let f = ObjectiveFunction::new("const", Bounds::uniform(2, -1.0, 1.0).unwrap(), |_| 7.0);
            let r = eagle_strategy_run(&f, &EagleConfig::new(local, 1)).unwrap();
            assert_eq!(r.best_value, 7.0);
            assert_eq!(r.terminated_by, Termination::Tolerance);
        }
    }

    #[test]
    fn budget_too_small() {
        let f = sphere2();
        let mut cfg = EagleConfig::new(LocalSearch::Pso(PsoParams::default()), 0);
        cfg.eval_budget = 29;
        assert!(matches!(eagle_strategy_run(&f, &cfg), Err(OptimError::BudgetTooSmall { .. })));
        let local = LocalSearch::Firefly(FireflyParams::default());
        assert!(matches!(plain_run(&local, &f, 10, 0), Err(OptimError::BudgetTooSmall { .. })));
    }

    #[test]
    fn budget_is_exact_and_history_monotone() {
        for local in [LocalSearch::Pso(PsoParams::default()), LocalSearch::Firefly(FireflyParams::default())] {
            for budget in [30, 31, 95, 600, 617] {
                let f = sphere2();
                let mut cfg = EagleConfig::new(local, 5);
                cfg.eval_budget = budget;
                let r = eagle_strategy_run(&f, &cfg).unwrap();
                assert_eq!(r.evaluations_used, f.evaluations());
                assert!(r.evaluations_used <= budget);
                assert!(r.history.windows(2).all(|w| w[1].best_value <= w[0].best_value));
                assert!(r.history.iter().all(|h| f.bounds().contains(&h.best_position)));
                assert_eq!(r.history.last().unwrap().best_value, r.best_value);

                let f = sphere2();
                let r = plain_run(&local, &f, budget, 5).unwrap();
                assert_eq!(r.evaluations_used, budget);
                assert_eq!(f.evaluations(), budget);
                assert!(r.history.windows(2).all(|w| w[1].best_value <= w[0].best_value));
            }
        }
    }

    #[test]
    fn same_seed_same_result() {
        let local = LocalSearch::Firefly(FireflyParams::default());
        let a = eagle_strategy_run(&sphere2(), &EagleConfig::new(local, 42)).unwrap();
        let b = eagle_strategy_run(&sphere2(), &EagleConfig::new(local, 42)).unwrap();
        assert_eq!(a, b);
        let c = eagle_strategy_run(&sphere2(), &EagleConfig::new(local, 43)).unwrap();
        assert_ne!(a.best_position, c.best_position);
    }

    #[test]
    fn two_agent_firefly_never_regresses() {
        let f = make_benchmark("sphere", 1, Bounds::uniform(1, -5.0, 5.0).unwrap()).unwrap();
        let local = LocalSearch::Firefly(FireflyParams { population: 2, ..Default::default() });
        let r = plain_run(&local, &f, 40, 3).unwrap();
        assert_eq!(r.history.len(), 20);
        assert!(r.history.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    }

    #[test]
    fn cycle_split_follows_global_fraction() {
        let mut cfg = EagleConfig::new(LocalSearch::Pso(PsoParams::default()), 0);
        assert_eq!(cfg.local_iterations_per_cycle(), 4);
        cfg.global_fraction = 0.5;
        assert_eq!(cfg.local_iterations_per_cycle(), 1);
        cfg.global_fraction = 0.01;
        assert_eq!(cfg.local_iterations_per_cycle(), 20);
        cfg.global_fraction = 1.0;
        assert!(cfg.validate().is_err());
    }
}
