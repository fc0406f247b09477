//! Configuration file loading and validation.
//!
//! The file is JSON with four optional blocks (`ga`, `files`, `lkas`,
//! `robot`); missing blocks and fields fall back to documented defaults,
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lkas::LkasConfig;
use crate::robot::RobotConfig;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config value for {field}: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaBlock {
    pub pop_size: usize,
    pub n_gen: usize,
    pub mut_rate: f64,
    pub cross_rate: f64,
    pub test_suite_size: usize,
}

impl Default for GaBlock {
    fn default() -> Self {
        GaBlock { pop_size: 150, n_gen: 200, mut_rate: 0.4, cross_rate: 0.9, test_suite_size: 30 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilesBlock {
    pub stats_path: String,
    pub tcs_path: String,
    pub images_path: String,
}

impl Default for FilesBlock {
    fn default() -> Self {
        FilesBlock {
            stats_path: "stats".to_string(),
            tcs_path: "tcs".to_string(),
            images_path: "images".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub ga: GaBlock,
    pub files: FilesBlock,
    pub lkas: LkasConfig,
    pub robot: RobotConfig,
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigFileError> {
        let invalid = |field: &str, message: String| {
            Err(ConfigFileError::Invalid { field: field.to_string(), message })
        };
        if self.ga.pop_size <= 1 {
            return invalid("ga.pop_size", format!("must be > 1, got {}", self.ga.pop_size));
        }
        if self.ga.n_gen == 0 {
            return invalid("ga.n_gen", "must be >= 1".to_string());
        }
        for (field, value) in
            [("ga.mut_rate", self.ga.mut_rate), ("ga.cross_rate", self.ga.cross_rate)]
        {
            if !(0.0..=1.0).contains(&value) {
                return invalid(field, format!("must be in [0, 1], got {value}"));
            }
        }
        if self.ga.test_suite_size == 0 || self.ga.test_suite_size > self.ga.pop_size {
            return invalid(
                "ga.test_suite_size",
                format!("must be in [1, pop_size], got {}", self.ga.test_suite_size),
            );
        }
        for (field, value) in [
            ("files.stats_path", &self.files.stats_path),
            ("files.tcs_path", &self.files.tcs_path),
            ("files.images_path", &self.files.images_path),
        ] {
            if value.is_empty() {
                return invalid(field, "must not be empty".to_string());
            }
        }
        for (field, lo, hi) in [
            ("lkas.straight range", self.lkas.straight_min, self.lkas.straight_max),
            ("lkas.angle range", self.lkas.angle_min, self.lkas.angle_max),
            ("lkas.cols range", self.lkas.min_cols as f64, self.lkas.max_cols as f64),
            ("robot.cols range", self.robot.min_cols as f64, self.robot.max_cols as f64),
            ("robot.wall length range", self.robot.wall_min_len as f64, self.robot.wall_max_len as f64),
        ] {
            if lo > hi {
                return invalid(field, format!("min {lo} > max {hi}"));
            }
        }
        if self.lkas.map_size <= 0.0 || self.lkas.lane_width <= 0.0 || self.lkas.turn_radius <= 0.0
        {
            return invalid("lkas", "map_size, lane_width and turn_radius must be positive".into());
        }
        if self.robot.width < 4 || self.robot.height < 4 {
            return invalid("robot", "grid must be at least 4x4".to_string());
        }
        if self.robot.resolution <= 0.0 {
            return invalid("robot.resolution", "must be positive".to_string());
        }
        Ok(())
    }
}

/// Loads and validates a config file.
pub fn load_config(path: &Path) -> Result<Config, ConfigFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigFileError::Read { path: path.to_path_buf(), source })?;
    let config: Config = serde_json::from_str(&text)
        .map_err(|source| ConfigFileError::Parse { path: path.to_path_buf(), source })?;
    config.validate()?;
    Ok(config)
}
