//! TOML configuration and manifest files. Relative paths inside a manifest
//! resolve against the manifest's own directory.
//!
//! Simulation config:
//!
//! ```toml
//! [sensor]
//! delta_t = 25e-6
//! [noise]
//! sigma_alpha = 0.05
//! ```
//!
//! Calibration manifest:
//!
//! ```toml
//! gauge_phi = 2.5e-5          # optional, defaults to the sensor's nominal threshold
//! [sensor]
//! height = 64
//! width = 64
//! [priors]                    # optional, defaults to NoiseConfig::default()
//! sigma_c = 5e-7
//! [[scene]]
//! luminance = 0.05
//! stream = "scene_00.spk"
//! ```
//!
//! Dataset manifest; per-scene `sensor`/`noise` tables replace the top-level
//! ones wholesale:
//!
//! ```toml
//! [sensor]
//! [noise]
//! [[scene]]
//! name = "gray"
//! luminance = "frames/gray"   # directory read by read_luminance_dir
//! seed = 7
//! clean = "out/gray_clean.spk"
//! noisy = "out/gray_noisy.spk"
//! params = "out/gray.npm"     # written; defaults to the noisy path with .npm
//! params_in = "fixed.npm"     # optional maps to use instead of sampling
//! ```

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::spike_file::read_stream;
use crate::calibration::{CalibrationScene, CalibrationSet};
use crate::error::{Error, FormatError, Result};
use crate::noise::NoiseConfig;
use crate::sensor::SensorConfig;

fn parse_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text)
        .map_err(|e| FormatError::Syntax(format!("{}: {e}", path.display())).into())
}

pub fn write_toml<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| Error::config(e.to_string()))?;
    super::write_file(path.as_ref(), text.as_bytes())
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub sensor: SensorConfig,
    pub noise: NoiseConfig,
}

impl SimConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        parse_toml(path.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationEntry {
    pub luminance: f64,
    pub stream: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_phi: Option<f64>,
    #[serde(default)]
    pub sensor: SensorConfig,
    #[serde(default)]
    pub priors: NoiseConfig,
    #[serde(rename = "scene")]
    pub scenes: Vec<CalibrationEntry>,
    #[serde(skip)]
    pub base: PathBuf,
}

impl CalibrationManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut m: Self = parse_toml(path)?;
        m.base = base_dir(path);
        Ok(m)
    }

    pub fn gauge(&self) -> f64 {
        self.gauge_phi.unwrap_or_else(|| self.sensor.threshold())
    }

    /// Reads every listed stream. Sensor size is taken from the streams.
    pub fn load_set(&self) -> Result<CalibrationSet> {
        let mut scenes = Vec::with_capacity(self.scenes.len());
        for e in &self.scenes {
            let stream = read_stream(self.base.join(&e.stream))?;
            scenes.push(CalibrationScene {
                luminance: e.luminance,
                stream,
            });
        }
        let mut cfg = self.sensor.clone();
        if let Some(first) = scenes.first() {
            cfg.height = first.stream.height();
            cfg.width = first.stream.width();
        }
        CalibrationSet::new(cfg, scenes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub luminance: PathBuf,
    #[serde(default)]
    pub seed: Option<u64>,
    pub clean: PathBuf,
    pub noisy: PathBuf,
    #[serde(default)]
    pub params: Option<PathBuf>,
    #[serde(default)]
    pub params_in: Option<PathBuf>,
    #[serde(default)]
    pub sensor: Option<SensorConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    #[serde(default)]
    pub sensor: SensorConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(rename = "scene")]
    pub scenes: Vec<DatasetEntry>,
    #[serde(skip)]
    pub base: PathBuf,
}

/// A dataset entry with defaults applied and paths resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedEntry {
    pub name: String,
    pub luminance: PathBuf,
    pub sensor: SensorConfig,
    pub noise: NoiseConfig,
    pub clean: PathBuf,
    pub noisy: PathBuf,
    pub params: PathBuf,
    pub params_in: Option<PathBuf>,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut m: Self = parse_toml(path)?;
        m.base = base_dir(path);
        Ok(m)
    }

    pub fn resolve(&self) -> Vec<ResolvedEntry> {
        self.scenes
            .iter()
            .map(|e| {
                let mut noise = e.noise.clone().unwrap_or_else(|| self.noise.clone());
                if let Some(seed) = e.seed {
                    noise.rng_seed = seed;
                }
                let noisy = self.base.join(&e.noisy);
                ResolvedEntry {
                    name: e.name.clone(),
                    luminance: self.base.join(&e.luminance),
                    sensor: e.sensor.clone().unwrap_or_else(|| self.sensor.clone()),
                    noise,
                    clean: self.base.join(&e.clean),
                    params: e
                        .params
                        .as_ref()
                        .map(|p| self.base.join(p))
                        .unwrap_or_else(|| noisy.with_extension("npm")),
                    noisy,
                    params_in: e.params_in.as_ref().map(|p| self.base.join(p)),
                }
            })
            .collect()
    }
}
