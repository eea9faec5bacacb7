//! Self-describing experiment output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    /// Shot-noise standard error; absent for exact evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
}

/// One experiment run. The embedded config reproduces it exactly:
/// `qec5 <experiment> --config <record>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    /// Distinguishes records of one experiment, e.g. the prepared state.
    pub label: String,
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub metrics: Vec<Metric>,
    /// Raw arrays: expectations, χ entries, syndrome grids.
    pub data: Value,
}

impl ResultRecord {
    pub fn new(experiment: &str, label: &str, config: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.to_string(),
            label: label.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config: config.clone(),
            metrics: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn push(&mut self, name: &str, value: f64, uncertainty: Option<f64>) {
        self.metrics.push(Metric { name: name.to_string(), value, uncertainty });
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// `<experiment>-<label>-<noise>-<mode>.json`. The label is skipped when
    /// empty; noise and mode are skipped for experiments that ignore them.
    pub fn file_name(&self) -> String {
        let mut parts = vec![self.experiment.clone()];
        if !self.label.is_empty() {
            parts.push(self.label.replace('+', "plus").replace('-', "minus"));
        }
        if !matches!(self.experiment.as_str(), "compile" | "syndrome-grid") {
            parts.push(self.config.noise.name().to_string());
            parts.push(self.config.mode_name().to_string());
        }
        format!("{}.json", parts.join("-"))
    }

    /// Writes the record under `dir` and returns the path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(self.file_name());
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::CorruptRecord { path: path.to_path_buf(), reason: e.to_string() })
    }
}
