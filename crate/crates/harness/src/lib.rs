//! Twin-experiment harness for the forced spring-mass study.
//!
//! A run simulates a noisy truth, synthesizes position observations from it,
//! and scores the Kalman filter, the ensemble Kalman filter and cycled 3D-Var
//! (plus a model-only open-loop baseline) against that truth. Results go to a
//! CSV time series and a `key=value` metrics file.

mod cli;
mod config;
mod error;
mod experiment;
mod output;

pub use cli::cli_main;
pub use config::{ExperimentConfig, Method};
pub use error::HarnessError;
pub use experiment::{run_experiment, MethodMetrics, RunResult};
pub use output::{render_csv, render_metrics, write_csv, write_metrics};
