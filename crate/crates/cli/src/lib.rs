//! Command-line experiments for the `steadyent` library. Each experiment
//! turns an [`ExperimentConfig`] into one or more CSV tables.

pub mod config;
pub mod experiments;
pub mod initial;
pub mod table;

use thiserror::Error;

use steadyent::closed_form::ClosedFormError;
use steadyent::liouville::LiouvilleError;
use steadyent::state::StateError;

pub use config::{ConfigFile, Experiment, ExperimentConfig, Grid, Overrides, Preset};
pub use experiments::{run, Output};
pub use initial::InitialState;
pub use table::Table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {key} `{value}`: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("initial state `{spec}`: {reason}")]
    InitialState { spec: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("spot check at omega = {omega}, coupling = {coupling}: integrated state differs from the steady state by {deviation:e}")]
    SpotCheck { omega: f64, coupling: f64, deviation: f64 },
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

impl CliError {
    pub fn invalid(key: &str, value: &str, reason: &str) -> Self {
        CliError::Invalid { key: key.to_string(), value: value.to_string(), reason: reason.to_string() }
    }
}
