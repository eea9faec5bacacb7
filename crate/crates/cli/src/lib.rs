//! Experiment runner for the five-qubit code simulator: configuration,
//! seeded experiments, result records and summary reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod report;

pub use config::{ExperimentConfig, NoiseSetting};
pub use error::{Error, Result};
pub use record::{Metric, ResultRecord};
