//! Eagle Strategy optimization: Lévy-flight exploration paired with PSO or
//! Firefly local search, plus a Lyapunov-weighted BLDC speed-tracking
//! objective for tuning PID gains.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fmt;
pub mod harness;
pub mod levy;
pub mod linalg;
pub mod objective;
pub mod optim;
pub mod plant;

pub use harness::{load_config, run_experiment, HarnessError, RunConfig};
pub use levy::{global_explore, levy_density, sample_levy_step, LevyParams};
pub use linalg::{solve_lyapunov, Matrix2, PMatrix};
pub use objective::{Bounds, ObjectiveFunction, TrackingProblem};
pub use optim::{eagle_strategy_run, plain_run, EagleConfig, LocalSearch, RunResult};
