//! Run configuration: a sectioned TOML file whose absent keys fall back to the
//! defaults below.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::levy::LevyParams;
use crate::objective::{BenchmarkName, Bounds, LyapunovObjectiveSpec};
use crate::optim::{EagleConfig, FireflyParams, LocalSearch, PsoParams};
use crate::plant::{MotorParams, Plant, ReferenceModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    EsPso,
    EsFfa,
    Pso,
    Ffa,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::EsPso => "es-pso",
            Algorithm::EsFfa => "es-ffa",
            Algorithm::Pso => "pso",
            Algorithm::Ffa => "ffa",
        }
    }

    pub fn is_eagle(&self) -> bool {
        matches!(self, Algorithm::EsPso | Algorithm::EsFfa)
    }

    pub fn uses_pso(&self) -> bool {
        matches!(self, Algorithm::EsPso | Algorithm::Pso)
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "es-pso" => Ok(Algorithm::EsPso),
            "es-ffa" => Ok(Algorithm::EsFfa),
            "pso" => Ok(Algorithm::Pso),
            "ffa" => Ok(Algorithm::Ffa),
            other => Err(format!("unknown algorithm {other:?} (expected es-pso, es-ffa, pso or ffa)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What gets optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Benchmark(BenchmarkName),
    BldcPid,
}

impl FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "bldc-pid" {
            return Ok(ObjectiveKind::BldcPid);
        }
        s.parse::<BenchmarkName>().map(ObjectiveKind::Benchmark).map_err(|_| {
            format!("unknown objective {s:?} (expected sphere, rosenbrock, rastrigin or bldc-pid)")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub objective: String,
    pub algorithm: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Defaults to `population × iterations` of the selected local algorithm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_budget: Option<u64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            objective: "bldc-pid".into(),
            algorithm: "es-pso".into(),
            seed: 1,
            output_dir: PathBuf::from("out"),
            eval_budget: None,
        }
    }
}

/// Box for the analytic benchmarks: the same interval on every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self { dimension: 2, lower: -5.0, upper: 5.0 }
    }
}

/// Search box of the `(kp, ki, kd)` gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Default for GainBounds {
    fn default() -> Self {
        Self { lower: vec![0.0, 0.0, 0.0], upper: vec![10.0, 10.0, 0.1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EagleSection {
    pub global_fraction: f64,
    pub tolerance: f64,
}

impl Default for EagleSection {
    fn default() -> Self {
        Self { global_fraction: 0.2, tolerance: 1e-10 }
    }
}

/// Grid export over two coordinates; the others are pinned to `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub axes: [usize; 2],
    pub resolution: usize,
    /// Full-length point supplying the non-grid coordinates. Defaults to the
    /// box centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: ExperimentSection,
    pub benchmark: BenchmarkSection,
    pub motor: MotorParams,
    pub model: ReferenceModelParams,
    pub objective: LyapunovObjectiveSpec,
    pub gain_bounds: GainBounds,
    pub pso: PsoParams,
    pub firefly: FireflyParams,
    pub levy: LevyParams,
    pub eagle: EagleSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSection>,
}

fn invalid(field: &str, reason: impl fmt::Display) -> HarnessError {
    HarnessError::Validation { field: field.to_string(), reason: reason.to_string() }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn algorithm(&self) -> Result<Algorithm, HarnessError> {
        self.experiment.algorithm.parse().map_err(|e| invalid("experiment.algorithm", e))
    }

    pub fn objective_kind(&self) -> Result<ObjectiveKind, HarnessError> {
        self.experiment.objective.parse().map_err(|e| invalid("experiment.objective", e))
    }

    pub fn local_search(&self) -> Result<LocalSearch, HarnessError> {
        Ok(if self.algorithm()?.uses_pso() {
            LocalSearch::Pso(self.pso)
        } else {
            LocalSearch::Firefly(self.firefly)
        })
    }

    pub fn eval_budget(&self) -> Result<u64, HarnessError> {
        let local = self.local_search()?;
        Ok(self.experiment.eval_budget.unwrap_or_else(|| local.default_budget()))
    }

    pub fn eagle_config(&self) -> Result<EagleConfig, HarnessError> {
        Ok(EagleConfig {
            levy: self.levy,
            local: self.local_search()?,
            global_fraction: self.eagle.global_fraction,
            tolerance: self.eagle.tolerance,
            eval_budget: self.eval_budget()?,
            seed: self.experiment.seed,
        })
    }

    pub fn plant(&self) -> Plant {
        Plant::Bldc(self.motor)
    }

    /// Search box of the selected objective.
    pub fn bounds(&self) -> Result<Bounds, HarnessError> {
        match self.objective_kind()? {
            ObjectiveKind::Benchmark(_) => {
                let b = &self.benchmark;
                Bounds::uniform(b.dimension, b.lower, b.upper).map_err(|e| invalid("benchmark", e))
            }
            ObjectiveKind::BldcPid => {
                let g = &self.gain_bounds;
                if g.lower.len() != 3 || g.upper.len() != 3 {
                    return Err(invalid("gain_bounds", "lower and upper need 3 entries (kp, ki, kd)"));
                }
                Bounds::new(g.lower.clone(), g.upper.clone()).map_err(|e| invalid("gain_bounds", e))
            }
        }
    }

    /// Checks every invariant the selected mode relies on, naming the first
    /// offending field.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let algorithm = self.algorithm()?;
        let kind = self.objective_kind()?;
        if self.benchmark.dimension == 0 {
            return Err(invalid("benchmark.dimension", "must be >= 1"));
        }
        let bounds = self.bounds()?;

        let local = self.local_search()?;
        let section = if algorithm.uses_pso() { "pso" } else { "firefly" };
        local.validate().map_err(|e| match e {
            crate::optim::OptimError::InvalidParams { field, reason } => {
                invalid(&format!("{section}.{field}"), reason)
            }
            other => invalid(section, other),
        })?;
        if algorithm.is_eagle() {
            self.levy.validate().map_err(|e| invalid("levy", e))?;
            let g = self.eagle.global_fraction;
            if !(g > 0.0 && g < 1.0) {
                return Err(invalid("eagle.global_fraction", "must lie in (0, 1)"));
            }
            if !(self.eagle.tolerance.is_finite() && self.eagle.tolerance > 0.0) {
                return Err(invalid("eagle.tolerance", "must be finite and > 0"));
            }
        }
        let budget = self.eval_budget()?;
        if budget < local.population() as u64 {
            return Err(invalid(
                "experiment.eval_budget",
                format!("{budget} is smaller than the population ({})", local.population()),
            ));
        }

        if kind == ObjectiveKind::BldcPid {
            self.motor.validate().map_err(|e| invalid("motor", e))?;
            self.model.validate().map_err(|e| invalid("model", e))?;
            self.objective.validate().map_err(|e| invalid("objective", e))?;
            let limit = crate::plant::max_time_step(&self.plant(), &self.model);
            if self.objective.dt > limit {
                return Err(invalid("objective.dt", format!("{} exceeds the stability limit {limit}", self.objective.dt)));
            }
        }

        if let Some(mesh) = &self.mesh {
            let dim = bounds.dim();
            if mesh.resolution < 2 {
                return Err(invalid("mesh.resolution", "must be >= 2"));
            }
            if mesh.axes.iter().any(|&a| a >= dim) || mesh.axes[0] == mesh.axes[1] {
                return Err(invalid("mesh.axes", format!("need two distinct indices below {dim}")));
            }
            if let Some(fixed) = &mesh.fixed {
                if fixed.len() != dim || !bounds.contains(fixed) {
                    return Err(invalid("mesh.fixed", format!("need {dim} values inside the search box")));
                }
            }
        }
        Ok(())
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    RunConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gets_all_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.pso, PsoParams { c1: 2.0, c2: 2.0, w: 1.0, population: 30, iterations: 20 });
        assert_eq!(
            c.firefly,
            FireflyParams { beta0: 0.2, gamma: 1.0, alpha: 0.3, population: 30, iterations: 20 }
        );
        assert_eq!(c.levy, LevyParams { lambda: 1.5, step_scale: 5.0 });
        assert_eq!(c.objective.divergence_penalty, 1000.0);
        assert_eq!(c.eval_budget().unwrap(), 600);
    }

    #[test]
    fn empty_sections_get_defaults() {
        let c = RunConfig::parse("[pso]\n[firefly]\n[levy]\n[eagle]\n").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn population_of_one_is_rejected() {
        let err = RunConfig::parse("[pso]\npopulation = 1\n").unwrap_err();
        assert!(matches!(&err, HarnessError::Validation { field, .. } if field.contains("population")), "{err}");
        let err = RunConfig::parse("[experiment]\nalgorithm = \"ffa\"\n[firefly]\npopulation = 1\n").unwrap_err();
        assert!(err.to_string().contains("population"));
    }

    #[test]
    fn unknown_algorithm_is_a_validation_error() {
        let err = RunConfig::parse("[experiment]\nalgorithm = \"ga\"\n").unwrap_err();
        assert!(matches!(&err, HarnessError::Validation { field, .. } if field == "experiment.algorithm"));
        let err = RunConfig::parse("[experiment]\nobjective = \"ackley\"\n").unwrap_err();
        assert!(matches!(&err, HarnessError::Validation { field, .. } if field == "experiment.objective"));
    }

    #[test]
    fn malformed_file_reports_line() {
        let err = RunConfig::parse("[pso]\nc1 = 2.0\nc2 = = 3\n").unwrap_err();
        assert!(matches!(err, HarnessError::Parse(_)));
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = RunConfig::parse("[pso]\nspeed = 2.0\n").unwrap_err();
        assert!(matches!(err, HarnessError::Parse(_)));
    }

    #[test]
    fn dumped_defaults_round_trip() {
        let text = RunConfig::default().to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), RunConfig::default());
        let custom = RunConfig {
            mesh: Some(MeshSection { axes: [0, 2], resolution: 5, fixed: Some(vec![1.0, 0.5, 0.0]) }),
            experiment: ExperimentSection { eval_budget: Some(900), ..Default::default() },
            ..Default::default()
        };
        assert_eq!(RunConfig::parse(&custom.to_toml()).unwrap(), custom);
    }

    #[test]
    fn mesh_and_timestep_validation() {
        let err = RunConfig::parse("[mesh]\naxes = [0, 3]\nresolution = 4\n").unwrap_err();
        assert!(err.to_string().contains("mesh.axes"));
        let err = RunConfig::parse("[mesh]\naxes = [0, 1]\nresolution = 1\n").unwrap_err();
        assert!(err.to_string().contains("mesh.resolution"));
        let err = RunConfig::parse("[objective]\ndt = 0.001\n").unwrap_err();
        assert!(err.to_string().contains("objective.dt"));
        let err = RunConfig::parse("[experiment]\neval_budget = 10\n").unwrap_err();
        assert!(err.to_string().contains("eval_budget"));
    }
}
