use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::OptimizerSettings;
use super::space::ParamSpace;
use super::variant::ModelVariant;
use crate::error::{Error, Result};

/// Calibration run configuration, read from a flat TOML file.
///
/// ```toml
/// variant = "wg2pp"
/// max_iters = 200
/// tolerance = 1e-10
/// grid_starts = 8
/// random_starts = 0
/// seed = 20100812
///
/// [bounds]
/// rho = [-0.99, 0.99]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    pub variant: ModelVariant,
    #[serde(default = "defaults::max_iters")]
    pub max_iters: usize,
    #[serde(default = "defaults::tolerance")]
    pub tolerance: f64,
    #[serde(default = "defaults::grid_starts")]
    pub grid_starts: usize,
    #[serde(default)]
    pub random_starts: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default)]
    pub bounds: BTreeMap<String, [f64; 2]>,
}

mod defaults {
    use super::OptimizerSettings;

    pub fn max_iters() -> usize {
        OptimizerSettings::default().max_iters
    }
    pub fn tolerance() -> f64 {
        OptimizerSettings::default().tolerance
    }
    pub fn grid_starts() -> usize {
        OptimizerSettings::default().grid_starts
    }
    pub fn seed() -> u64 {
        OptimizerSettings::default().seed
    }
}

impl CalibrationConfig {
    pub fn new(variant: ModelVariant) -> Self {
        let s = OptimizerSettings::default();
        Self {
            variant,
            max_iters: s.max_iters,
            tolerance: s.tolerance,
            grid_starts: s.grid_starts,
            random_starts: s.random_starts,
            seed: s.seed,
            bounds: BTreeMap::new(),
        }
    }

    pub fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            grid_starts: self.grid_starts.min(8),
            random_starts: self.random_starts,
            seed: self.seed,
        }
    }

    pub fn space(&self) -> Result<ParamSpace> {
        ParamSpace::new(self.variant).with_bounds(&self.bounds)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParams(format!("calibration config: {e}")))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}
