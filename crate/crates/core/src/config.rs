//! Optional TOML configuration for category thresholds.
//!
//! ```toml
//! normal_max = 0
//! cardiac_min = 3
//! ```
//!
//! Missing keys fall back to the defaults; explicit overrides (command-line
//! flags) win over the file.

use serde::Deserialize;
use thiserror::Error;

use crate::coupling::{CouplingError, Thresholds};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Thresholds(#[from] CouplingError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub normal_max: Option<u32>,
    pub cardiac_min: Option<u32>,
}

impl ThresholdConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Layers `overrides` on top of `self`, then fills gaps from defaults.
    pub fn resolve(&self, overrides: &ThresholdConfig) -> Result<Thresholds, ConfigError> {
        let d = Thresholds::default();
        let t = Thresholds {
            normal_max: overrides.normal_max.or(self.normal_max).unwrap_or(d.normal_max),
            cardiac_min: overrides.cardiac_min.or(self.cardiac_min).unwrap_or(d.cardiac_min),
        };
        t.validate()?;
        Ok(t)
    }
}
