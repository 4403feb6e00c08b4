//! Sweep configuration: JSON schema, parsing and validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stackrobust::observation::{DEFAULT_ENUM_LIMIT, DEFAULT_TRIALS};

use crate::error::{CliError, Result};

/// A batch experiment: every game in `games` crossed with every `N`.
///
/// ```json
/// {
///   "games": [{"example": 2}, {"file": "game.json"},
///             {"ensemble": {"count": 50, "targets": 5, "seed": 7}}],
///   "N_values": [25, 50, 100],
///   "p_exponent": 0.25,
///   "eval": {"auto": {"enum_limit": 10000000, "trials": 2000}},
///   "seed": 42,
///   "output": "sweep.csv",
///   "format": "csv"
/// }
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub games: Vec<GameSource>,
    #[serde(rename = "N_values")]
    pub n_values: Vec<u64>,
    #[serde(default = "default_p_exponent")]
    pub p_exponent: f64,
    #[serde(default)]
    pub eval: EvalSpec,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub format: ReportFormat,
}

fn default_p_exponent() -> f64 {
    0.25
}

/// One entry of `games`. Relative file paths resolve against the working
/// directory of the `sweep` invocation.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    File(PathBuf),
    Example(u32),
    Ensemble { count: usize, targets: usize, seed: u64 },
}

/// How `f_N` is evaluated: always exactly, always Monte Carlo, or exact
/// whenever the enumeration fits under `enum_limit` and Monte Carlo above.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EvalSpec {
    Exact,
    Mc {
        #[serde(default = "default_trials")]
        trials: u64,
    },
    Auto {
        #[serde(default = "default_enum_limit")]
        enum_limit: u64,
        #[serde(default = "default_trials")]
        trials: u64,
    },
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_enum_limit() -> u64 {
    DEFAULT_ENUM_LIMIT
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec::Auto { enum_limit: DEFAULT_ENUM_LIMIT, trials: DEFAULT_TRIALS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: SweepConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.games.is_empty() {
            return Err(CliError::Config("games must not be empty".into()));
        }
        if self.n_values.is_empty() {
            return Err(CliError::Config("N_values must not be empty".into()));
        }
        if let Some(zero) = self.n_values.iter().find(|&&n| n == 0) {
            return Err(CliError::Config(format!("N_values must be positive, got {zero}")));
        }
        if !(self.p_exponent > 0.0 && self.p_exponent < 0.5) {
            return Err(CliError::Config(format!(
                "p_exponent must lie strictly between 0 and 1/2, got {}",
                self.p_exponent
            )));
        }
        match self.eval {
            EvalSpec::Mc { trials } | EvalSpec::Auto { trials, .. } if trials == 0 => {
                return Err(CliError::Config("trials must be positive".into()));
            }
            EvalSpec::Auto { enum_limit, .. } if enum_limit == 0 => {
                return Err(CliError::Config("enum_limit must be positive".into()));
            }
            _ => {}
        }
        for source in &self.games {
            match source {
                GameSource::Example(id) if !(1..=3).contains(id) => {
                    return Err(CliError::Config(format!("example id {id} (want 1, 2 or 3)")));
                }
                GameSource::Ensemble { targets, .. } if *targets < 2 => {
                    return Err(CliError::Config("ensemble targets must be at least 2".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
