//! Experiment configuration: a TOML file layered over the bundled profile,
//! then command-line overrides.

use std::path::{Path, PathBuf};

use perfect_code::code::{RelabelingMap, NUM_QUBITS};
use perfect_code::noise::{DeviceParams, NoiseParams, QubitParams, TphiMode};
use perfect_code::readout::ReadoutModel;
use perfect_code::recompiler::OptimizerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::ResultRecord;

/// The bundled default profile, device rows verbatim.
pub const DEFAULT_PROFILE: &str = include_str!("../profiles/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseSetting {
    /// Ideal gates and readout.
    Off,
    /// The device table as given.
    #[serde(rename = "paper")]
    Device,
    /// The device table with `T2* = T1` on every qubit.
    LongT2,
}

impl NoiseSetting {
    pub fn name(self) -> &'static str {
        match self {
            NoiseSetting::Off => "off",
            NoiseSetting::Device => "paper",
            NoiseSetting::LongT2 => "long-t2",
        }
    }
}

/// One device row in config units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceRow {
    pub name: String,
    pub t1_us: f64,
    pub t2star_us: f64,
    pub f00: f64,
    pub f11: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub t_1q_ns: f64,
    pub t_2q_ns: f64,
}

/// Multipliers on the damping and dephasing rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseScale {
    pub k: f64,
    pub k_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Shots per measurement setting in sampled mode.
    pub shots: u64,
    /// Estimate from finite samples, with readout error when noise is on.
    pub sampled: bool,
    pub noise: NoiseSetting,
    pub tphi_mode: TphiMode,
    pub out: PathBuf,
    /// Optional TOML file with `[[device]]` rows; replaces `device`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device_file: Option<PathBuf>,
    pub timings: Timings,
    pub noise_scale: NoiseScale,
    /// Rows in wire order.
    pub device: Vec<DeviceRow>,
    pub optimizer: OptimizerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Bundled {
            seed: u64,
            shots: u64,
            sampled: bool,
            noise: NoiseSetting,
            tphi_mode: TphiMode,
            out: PathBuf,
            timings: Timings,
            noise_scale: NoiseScale,
            device: Vec<DeviceRow>,
            optimizer: OptimizerConfig,
        }
        let b: Bundled = toml::from_str(DEFAULT_PROFILE).expect("bundled profile parses");
        Self {
            seed: b.seed,
            shots: b.shots,
            sampled: b.sampled,
            noise: b.noise,
            tphi_mode: b.tphi_mode,
            out: b.out,
            device_file: None,
            timings: b.timings,
            noise_scale: b.noise_scale,
            device: b.device,
            optimizer: b.optimizer,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceFile {
    device: Vec<DeviceRow>,
}

impl ExperimentConfig {
    /// Parses TOML text; missing keys take the bundled values.
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Loads a TOML config, or the config snapshot embedded in a result
    /// record when the file ends in `.json`. A `device_file` is resolved
    /// against the config's directory and inlined.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str::<ResultRecord>(&text)?.config
        } else {
            Self::from_toml(&text)?
        };
        if let Some(rel) = cfg.device_file.take() {
            let file = path.parent().unwrap_or(Path::new(".")).join(&rel);
            let rows = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            cfg.device = toml::from_str::<DeviceFile>(&rows)?.device;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be positive".into()));
        }
        if self.device.len() != NUM_QUBITS {
            return Err(Error::Config(format!("device needs {NUM_QUBITS} rows, found {}", self.device.len())));
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::Config("out must name a directory".into()));
        }
        self.noise_params(NoiseSetting::Device)?.validate()?;
        self.optimizer.validate()?;
        Ok(())
    }

    /// The device table in SI units, wire order.
    pub fn device_params(&self) -> Result<DeviceParams> {
        let qubits = self
            .device
            .iter()
            .map(|r| QubitParams { name: r.name.clone(), t1: r.t1_us / 1e6, t2star: r.t2star_us / 1e6, f00: r.f00, f11: r.f11 })
            .collect();
        Ok(DeviceParams::new(qubits)?)
    }

    fn noise_params(&self, setting: NoiseSetting) -> Result<NoiseParams> {
        let device = self.device_params()?;
        let device = if setting == NoiseSetting::LongT2 { device.with_long_t2() } else { device };
        let mut n = NoiseParams::new(device)
            .with_mode(self.tphi_mode)
            .with_timings(self.timings.t_1q_ns / 1e9, self.timings.t_2q_ns / 1e9);
        n.k = self.noise_scale.k;
        n.k_phi = self.noise_scale.k_phi;
        Ok(n)
    }

    /// Decoherence in wire order, `None` when noise is off.
    pub fn noise(&self) -> Result<Option<NoiseParams>> {
        match self.noise {
            NoiseSetting::Off => Ok(None),
            s => self.noise_params(s).map(Some),
        }
    }

    /// Readout confusion for the label-ordered five-qubit register;
    /// `None` when noise is off.
    pub fn code_readout(&self) -> Result<Option<ReadoutModel>> {
        if self.noise == NoiseSetting::Off {
            return Ok(None);
        }
        let device = self.device_params()?.reordered(&RelabelingMap::device().label_to_wire());
        Ok(Some(ReadoutModel::from_device(&device)?))
    }

    /// Readout confusion of the decoder's output wire.
    pub fn output_readout(&self) -> Result<Option<ReadoutModel>> {
        if self.noise == NoiseSetting::Off {
            return Ok(None);
        }
        Ok(Some(ReadoutModel::from_device(&self.device_params()?.reordered(&[0]))?))
    }

    /// `exact` or `sampled`, for record names.
    pub fn mode_name(&self) -> &'static str {
        if self.sampled {
            "sampled"
        } else {
            "exact"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_profile_matches_library_device() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let lib = DeviceParams::reference();
        let ours = cfg.device_params().unwrap();
        for (a, b) in ours.qubits.iter().zip(&lib.qubits) {
            assert_eq!(a.name, b.name);
            assert_eq!((a.t1, a.t2star), (b.t1, b.t2star));
            assert_eq!((a.f00, a.f11), (b.f00, b.f11));
        }
        assert_eq!(cfg.noise().unwrap().unwrap(), NoiseParams::reference());
    }

    #[test]
    fn partial_file_overrides_only_given_keys() {
        let cfg = ExperimentConfig::from_toml("seed = 7\nnoise = \"long-t2\"\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.noise, NoiseSetting::LongT2);
        assert_eq!(cfg.shots, 10_000);
        assert_eq!(cfg.device.len(), 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("sed = 7\n").is_err());
        assert!(ExperimentConfig::from_toml("noise = \"loud\"\n").is_err());
    }

    #[test]
    fn snapshot_round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }
}
