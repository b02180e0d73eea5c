use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{NED_WINDOW_S, OCTAVE_CENTERS};
use crate::geometry::{validate_scene, SceneConfig};
use crate::network::MatrixSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Wav,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wav" => Ok(OutputFormat::Wav),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::arg(format!("unknown format '{s}' (wav, csv)"))),
        }
    }
}

/// Which analyses `analyze` and `compare` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSwitches {
    pub edc: bool,
    pub ned: bool,
    pub ned_window_s: f64,
    /// Octave band centres for band T60; empty disables it.
    pub bands: Vec<f64>,
}

impl Default for AnalysisSwitches {
    fn default() -> Self {
        AnalysisSwitches {
            edc: true,
            ned: true,
            ned_window_s: NED_WINDOW_S,
            bands: OCTAVE_CENTERS[..6].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rir: Option<PathBuf>,
    pub format: OutputFormat,
}

/// One experiment: a scene, the network choice and what to produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolkitConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    pub scene: SceneConfig,
    #[serde(default)]
    pub matrix: MatrixSpec,
    #[serde(default)]
    pub analysis: AnalysisSwitches,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_duration() -> f64 {
    1.0
}

impl ToolkitConfig {
    pub fn new(scene: SceneConfig) -> Self {
        ToolkitConfig {
            seed: 0,
            duration: default_duration(),
            scene,
            matrix: MatrixSpec::default(),
            analysis: AnalysisSwitches::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ToolkitConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Config("duration must be positive".into()));
        }
        if !(self.analysis.ned_window_s > 0.0) {
            return Err(Error::Config("ned_window_s must be positive".into()));
        }
        let report = validate_scene(&self.scene);
        if !report.is_ok() {
            return Err(Error::InvalidScene(report.violations));
        }
        Ok(())
    }
}
