use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{io_err, Algorithm, HarnessError, ObjectiveKind, RunConfig};
use crate::objective::{make_benchmark, ObjectiveFunction, TrackingProblem};
use crate::optim::{eagle_strategy_run, plain_run, RunResult, Termination};
use crate::plant::PidGains;

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub objective: String,
    pub algorithm: String,
    pub seed: u64,
    pub best_value: f64,
    pub best_position: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_gains: Option<PidGains>,
    pub evaluations_used: u64,
    pub terminated_by: Termination,
    pub config: RunConfig,
}

/// The objective a config selects, with its search box.
pub fn build_objective(config: &RunConfig) -> Result<ObjectiveFunction, HarnessError> {
    let bounds = config.bounds()?;
    Ok(match config.objective_kind()? {
        ObjectiveKind::Benchmark(name) => make_benchmark(name.as_str(), bounds.dim(), bounds)?,
        ObjectiveKind::BldcPid => tracking_problem(config)?.into_objective(bounds)?,
    })
}

fn tracking_problem(config: &RunConfig) -> Result<TrackingProblem, HarnessError> {
    Ok(TrackingProblem::new(config.objective.clone(), config.plant(), config.model)?)
}

/// Runs the configured optimizer without touching the filesystem.
pub fn run_optimizer(config: &RunConfig) -> Result<RunResult, HarnessError> {
    config.validate()?;
    let objective = build_objective(config)?;
    let algorithm = config.algorithm()?;
    let result = if algorithm.is_eagle() {
        eagle_strategy_run(&objective, &config.eagle_config()?)?
    } else {
        plain_run(&config.local_search()?, &objective, config.eval_budget()?, config.experiment.seed)?
    };
    Ok(result)
}

/// Runs the configured optimizer and writes `history.csv`, `summary.json` and,
/// for the tracking objective, `trajectory.csv` of the best gains into
/// `out_dir`.
pub fn run_experiment(config: &RunConfig, out_dir: &Path) -> Result<RunSummary, HarnessError> {
    let result = run_optimizer(config)?;
    let algorithm: Algorithm = config.algorithm()?;
    let kind = config.objective_kind()?;

    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join("history.csv");
    write_with(&path, |w| result.write_csv(w))?;

    let mut final_gains = None;
    if kind == ObjectiveKind::BldcPid {
        let gains = PidGains::from_slice(&result.best_position).expect("tracking search is 3-dimensional");
        final_gains = Some(gains);
        let log = tracking_problem(config)?.simulate(&gains)?;
        let path = out_dir.join("trajectory.csv");
        write_with(&path, |w| log.write_csv(w))?;
    }

    let summary = RunSummary {
        objective: config.experiment.objective.clone(),
        algorithm: algorithm.as_str().to_string(),
        seed: config.experiment.seed,
        best_value: result.best_value,
        best_position: result.best_position.clone(),
        final_gains,
        evaluations_used: result.evaluations_used,
        terminated_by: result.terminated_by,
        config: config.clone(),
    };
    let path = out_dir.join("summary.json");
    write_with(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, &summary).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    Ok(summary)
}

pub(crate) fn write_with<F>(path: &Path, body: F) -> Result<(), HarnessError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}
