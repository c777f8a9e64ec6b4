//! TOML configuration layered under command-line flags.
//!
//! Precedence is flags, then the file, then built-in defaults. Unknown keys
//! are rejected so typos surface immediately.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ramsey_core::aqo::{AqoConfig, Schedule, ScheduleShape};
use ramsey_core::driver::DriverOptions;
use ramsey_core::exec::Execution;
use ramsey_core::search::Budget;
use ramsey_core::tabu::TabuParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabuSection {
    pub iterations: Option<u64>,
    pub restarts: Option<usize>,
    pub tenure: Option<usize>,
    pub aspiration: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AqoSection {
    pub runtime: Option<f64>,
    pub steps: Option<usize>,
    pub shape: Option<ScheduleShape>,
    pub shots: Option<usize>,
    pub confidence: Option<f64>,
    pub corroborate: Option<bool>,
}

/// Every setting is optional; absent means "use the next layer down".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub budget: Option<Budget>,
    pub seed: Option<u64>,
    pub census: Option<bool>,
    pub witness_cap: Option<usize>,
    pub execution: Option<Execution>,
    pub run_dir: Option<PathBuf>,
    #[serde(default)]
    pub tabu: TabuSection,
    #[serde(default)]
    pub aqo: AqoSection,
}

impl Settings {
    /// `self` wins wherever it is set.
    pub fn over(self, lower: Settings) -> Settings {
        Settings {
            budget: self.budget.or(lower.budget),
            seed: self.seed.or(lower.seed),
            census: self.census.or(lower.census),
            witness_cap: self.witness_cap.or(lower.witness_cap),
            execution: self.execution.or(lower.execution),
            run_dir: self.run_dir.or(lower.run_dir),
            tabu: TabuSection {
                iterations: self.tabu.iterations.or(lower.tabu.iterations),
                restarts: self.tabu.restarts.or(lower.tabu.restarts),
                tenure: self.tabu.tenure.or(lower.tabu.tenure),
                aspiration: self.tabu.aspiration.or(lower.tabu.aspiration),
            },
            aqo: AqoSection {
                runtime: self.aqo.runtime.or(lower.aqo.runtime),
                steps: self.aqo.steps.or(lower.aqo.steps),
                shape: self.aqo.shape.or(lower.aqo.shape),
                shots: self.aqo.shots.or(lower.aqo.shots),
                confidence: self.aqo.confidence.or(lower.aqo.confidence),
                corroborate: self.aqo.corroborate.or(lower.aqo.corroborate),
            },
        }
    }
}

pub fn parse_config(text: &str, path: &Path) -> Result<Settings, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads a settings file. A missing path yields empty settings.
pub fn load_config(path: Option<&Path>) -> Result<Settings, ConfigError> {
    let Some(path) = path else {
        return Ok(Settings::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Fully resolved options.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Effective {
    pub budget: Budget,
    pub seed: u64,
    pub census: bool,
    pub witness_cap: usize,
    pub exec: Execution,
    pub run_dir: PathBuf,
    pub tabu: TabuParams,
    pub aqo: AqoConfig,
}

pub const RUN_DIR_ENV: &str = "RAMSEY_RUN_DIR";

impl Effective {
    pub fn resolve(s: &Settings) -> Self {
        let td = TabuParams::default();
        let ad = AqoConfig::default();
        let exec = s.execution.unwrap_or_default();
        let seed = s.seed.unwrap_or(0);
        let run_dir = s
            .run_dir
            .clone()
            .or_else(|| std::env::var_os(RUN_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("runs"));
        Self {
            budget: s.budget.unwrap_or_default(),
            seed,
            census: s.census.unwrap_or(false),
            witness_cap: s.witness_cap.unwrap_or(64),
            exec,
            run_dir,
            tabu: TabuParams {
                iterations: s.tabu.iterations.unwrap_or(td.iterations),
                restarts: s.tabu.restarts.unwrap_or(td.restarts),
                tenure: s.tabu.tenure.or(td.tenure),
                aspiration: s.tabu.aspiration.unwrap_or(td.aspiration),
                seed,
                exec,
            },
            aqo: AqoConfig {
                schedule: Schedule {
                    shape: s.aqo.shape.unwrap_or(ad.schedule.shape),
                    runtime: s.aqo.runtime.unwrap_or(ad.schedule.runtime),
                    steps: s.aqo.steps.unwrap_or(ad.schedule.steps),
                },
                calibration_shots: s.aqo.shots.unwrap_or(ad.calibration_shots),
                confidence: s.aqo.confidence.unwrap_or(ad.confidence),
                corroborate: s.aqo.corroborate.unwrap_or(ad.corroborate),
                seed,
                exec,
                ..ad
            },
        }
    }

    pub fn driver(&self) -> DriverOptions {
        DriverOptions {
            budget: self.budget,
            census: self.census,
            witness_cap: self.witness_cap,
            tabu: self.tabu,
            exec: self.exec,
        }
    }
}
