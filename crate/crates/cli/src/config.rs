//! Report configuration and numeric settings.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use powpart_core::saddle::SolverConfig;
use serde::Deserialize;

use crate::error::{io_error, HarnessError, HarnessResult};

pub const ENV_PRECISION: &str = "POWPART_PRECISION_DIGITS";
pub const ENV_EPSILON: &str = "POWPART_EPSILON";

/// Binary64 carries at most about 16 significant digits.
pub const MAX_PRECISION_DIGITS: u32 = 16;
pub const MIN_PRECISION_DIGITS: u32 = 15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// How lengths `m` are picked for each `n`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MPolicy {
    /// `m = round(mu_n)`.
    Center,
    /// `m = round(mu_n + x sigma_n)` for `x = lo, lo + step, ..., hi`.
    XGrid { lo: f64, hi: f64, step: f64 },
    Explicit(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: String,
    pub n_grid: Vec<u64>,
    pub m_policy: MPolicy,
    #[serde(default = "default_digits")]
    pub precision_digits: u32,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Include exact counts; needs a rational alpha.
    #[serde(default = "default_true")]
    pub compare_exact: bool,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn default_digits() -> u32 {
    MIN_PRECISION_DIGITS
}

fn default_epsilon() -> f64 {
    powpart_core::boltzmann::DEFAULT_EPSILON
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn from_json(text: &str) -> HarnessResult<Self> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> HarnessResult<()> {
        if self.n_grid.is_empty() {
            return Err(HarnessError::Config("n_grid is empty".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(HarnessError::Config("n_grid entries must be positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("n_grid must be strictly increasing".into()));
        }
        if let MPolicy::XGrid { lo, hi, step } = self.m_policy {
            x_grid(lo, hi, step)?;
        }
        self.settings()?;
        Ok(())
    }

    pub fn settings(&self) -> HarnessResult<Settings> {
        Settings::new(self.precision_digits, self.epsilon)
    }
}

/// Grid `lo, lo + step, ...` up to `hi` inclusive.
pub fn x_grid(lo: f64, hi: f64, step: f64) -> HarnessResult<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(HarnessError::Config(format!(
            "x grid needs finite lo <= hi and step > 0, got {lo}:{hi}:{step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(HarnessError::Config(format!("x grid has {count} points")));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Parses `lo:hi:step`.
pub fn parse_x_range(text: &str) -> HarnessResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || HarnessError::Usage(format!("x range '{text}' is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    x_grid(v[0], v[1], v[2])
}

/// Numeric knobs shared by all commands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub precision_digits: u32,
    pub epsilon: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            precision_digits: default_digits(),
            epsilon: default_epsilon(),
        }
    }
}

impl Settings {
    pub fn new(precision_digits: u32, epsilon: f64) -> HarnessResult<Self> {
        if !(MIN_PRECISION_DIGITS..=MAX_PRECISION_DIGITS).contains(&precision_digits) {
            return Err(HarnessError::Config(format!(
                "precision_digits must lie in {MIN_PRECISION_DIGITS}..={MAX_PRECISION_DIGITS} (binary64), got {precision_digits}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 1e-6) {
            return Err(HarnessError::Config(format!("epsilon must lie in (0, 1e-6], got {epsilon}")));
        }
        Ok(Settings {
            precision_digits,
            epsilon,
        })
    }

    /// Applies `POWPART_PRECISION_DIGITS` and `POWPART_EPSILON` when set.
    pub fn with_env(self) -> HarnessResult<Self> {
        let mut digits = self.precision_digits;
        let mut epsilon = self.epsilon;
        if let Ok(v) = std::env::var(ENV_PRECISION) {
            digits = v
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{ENV_PRECISION}='{v}' is not an integer")))?;
        }
        if let Ok(v) = std::env::var(ENV_EPSILON) {
            epsilon = v
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{ENV_EPSILON}='{v}' is not a number")))?;
        }
        Settings::new(digits, epsilon)
    }

    /// Residual tolerance `10^(5 - digits)`: 1e-10 at 15 digits.
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tolerance: 10f64.powi(5 - self.precision_digits as i32),
            epsilon: self.epsilon,
            ..SolverConfig::default()
        }
    }
}
