//! Population optimizers: PSO and Firefly local search, and the two-stage
//! Eagle Strategy that alternates them with Lévy-flight exploration.

mod eagle;
mod firefly;
mod pso;

pub use eagle::{eagle_strategy_run, plain_run};
pub use firefly::{firefly_accept, firefly_move, firefly_step, FireflyAgent, FireflyParams};
pub use pso::{pso_accept, pso_step, Particle, PsoParams};

use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::levy::{LevyError, LevyParams};
use crate::objective::{Bounds, ObjectiveFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error("evaluation budget {budget} is smaller than one population evaluation ({population})")]
    BudgetTooSmall { budget: u64, population: usize },
    #[error("invalid optimizer parameter {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error(transparent)]
    Levy(#[from] LevyError),
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> OptimError {
    OptimError::InvalidParams { field, reason: reason.into() }
}

/// Source of `Uniform(0, 1)` draws. Implemented for every [`Rng`]; tests
/// substitute fixed sequences to check single steps by hand.
pub trait UnitDraws {
    fn unit(&mut self) -> f64;
}

impl<R: Rng + ?Sized> UnitDraws for R {
    fn unit(&mut self) -> f64 {
        self.gen::<f64>()
    }
}

/// Local intensification algorithm and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase")]
pub enum LocalSearch {
    Pso(PsoParams),
    Firefly(FireflyParams),
}

impl LocalSearch {
    pub fn population(&self) -> usize {
        match self {
            LocalSearch::Pso(p) => p.population,
            LocalSearch::Firefly(p) => p.population,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            LocalSearch::Pso(p) => p.iterations,
            LocalSearch::Firefly(p) => p.iterations,
        }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        match self {
            LocalSearch::Pso(p) => p.validate(),
            LocalSearch::Firefly(p) => p.validate(),
        }
    }

    /// `population × iterations`, the budget of one plain run.
    pub fn default_budget(&self) -> u64 {
        (self.population() * self.iterations()) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EagleConfig {
    pub levy: LevyParams,
    pub local: LocalSearch,
    /// Share of each cycle's evaluations spent on Lévy exploration.
    pub global_fraction: f64,
    /// Cycle-to-cycle improvement of the best value below which a cycle counts
    /// as stalled; two stalled cycles in a row end the run.
    pub tolerance: f64,
    pub eval_budget: u64,
    pub seed: u64,
}

impl EagleConfig {
    pub fn new(local: LocalSearch, seed: u64) -> Self {
        Self {
            levy: LevyParams::default(),
            local,
            global_fraction: 0.2,
            tolerance: 1e-10,
            eval_budget: local.default_budget(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        self.levy.validate()?;
        self.local.validate()?;
        if !(self.global_fraction > 0.0 && self.global_fraction < 1.0) {
            return Err(invalid("global_fraction", "must lie in (0, 1)"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be finite and > 0"));
        }
        check_budget(self.eval_budget, self.local.population())
    }

    /// Local iterations per cycle so that exploration takes `global_fraction`
    /// of the cycle.
    pub fn local_iterations_per_cycle(&self) -> usize {
        let ratio = (1.0 - self.global_fraction) / self.global_fraction;
        (ratio.round() as usize).clamp(1, self.local.iterations().max(1))
    }
}

pub(crate) fn check_budget(budget: u64, population: usize) -> Result<(), OptimError> {
    if budget < population as u64 {
        Err(OptimError::BudgetTooSmall { budget, population })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Budget,
    Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub evaluations: u64,
    pub best_value: f64,
    pub best_position: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    pub evaluations_used: u64,
    pub history: Vec<HistoryEntry>,
    pub terminated_by: Termination,
}

impl RunResult {
    /// `iteration,evals,best_value,best_position_0,...`, one row per history
    /// entry, values in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "iteration,evals,best_value")?;
        for i in 0..self.best_position.len() {
            write!(w, ",best_position_{i}")?;
        }
        writeln!(w)?;
        for h in &self.history {
            write!(w, "{},{},{:?}", h.iteration, h.evaluations, h.best_value)?;
            for v in &h.best_position {
                write!(w, ",{v:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Evaluation gate: counts calls against a hard budget and keeps the best
/// point seen so far.
pub(crate) struct Budget<'a> {
    objective: &'a ObjectiveFunction,
    limit: u64,
    used: u64,
    best_position: Vec<f64>,
    best_value: f64,
    iteration: usize,
    history: Vec<HistoryEntry>,
}

impl<'a> Budget<'a> {
    pub(crate) fn new(objective: &'a ObjectiveFunction, limit: u64) -> Self {
        Self {
            objective,
            limit,
            used: 0,
            best_position: Vec::new(),
            best_value: f64::INFINITY,
            iteration: 0,
            history: Vec::new(),
        }
    }

    pub(crate) fn bounds(&self) -> &'a Bounds {
        self.objective.bounds()
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.used >= self.limit
    }

    /// `None` once the budget is spent.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        self.used += 1;
        let mut value = self.objective.evaluate(x);
        if value.is_nan() {
            value = f64::INFINITY;
        }
        if value < self.best_value || self.best_position.is_empty() {
            self.best_value = value;
            self.best_position = x.to_vec();
        }
        Some(value)
    }

    pub(crate) fn best_value(&self) -> f64 {
        self.best_value
    }

    pub(crate) fn best_position(&self) -> &[f64] {
        &self.best_position
    }

    /// Appends a history row for the iteration just completed.
    pub(crate) fn record(&mut self) {
        self.history.push(HistoryEntry {
            iteration: self.iteration,
            evaluations: self.used,
            best_value: self.best_value,
            best_position: self.best_position.clone(),
        });
        self.iteration += 1;
    }

    pub(crate) fn finish(self, terminated_by: Termination) -> RunResult {
        RunResult {
            best_position: self.best_position,
            best_value: self.best_value,
            evaluations_used: self.used,
            history: self.history,
            terminated_by,
        }
    }
}

/// Uniform random point in the box.
pub(crate) fn random_point<D: UnitDraws + ?Sized>(bounds: &Bounds, draws: &mut D) -> Vec<f64> {
    (0..bounds.dim())
        .map(|i| bounds.clamp_coord(i, bounds.lower()[i] + draws.unit() * bounds.width(i)))
        .collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use std::collections::VecDeque;

    use super::UnitDraws;

    /// Replays a fixed list of draws.
    pub struct FixedDraws(pub VecDeque<f64>);

    impl FixedDraws {
        pub fn new(values: &[f64]) -> Self {
            Self(values.iter().copied().collect())
        }
    }

    impl UnitDraws for FixedDraws {
        fn unit(&mut self) -> f64 {
            self.0.pop_front().expect("ran out of fixed draws")
        }
    }
}
