//! Experiment harness: config loading, optimizer runs with CSV/JSON output,
//! and objective-surface export.

mod config;
mod experiment;
mod mesh;

pub use config::{
    load_config, Algorithm, BenchmarkSection, EagleSection, ExperimentSection, GainBounds,
    MeshSection, ObjectiveKind, RunConfig,
};
pub use experiment::{build_objective, run_experiment, run_optimizer, RunSummary};
pub use mesh::{compute_mesh, export_mesh, MeshGrid};

use std::path::PathBuf;

use thiserror::Error;

use crate::objective::ObjectiveError;
use crate::optim::OptimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) | HarnessError::Validation { .. } => 3,
            HarnessError::Objective(_) | HarnessError::Optim(_) => 4,
            HarnessError::Io { .. } => 5,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}
