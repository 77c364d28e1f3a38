use std::path::Path;

use carnot_core::random::RationalDistribution;
use carnot_core::report::ReportConfig;
use carnot_core::scalar::parse_rational;
use carnot_core::{hall, Rational};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub dimension: usize,
    pub group_step: usize,
    pub group_dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            dimension: hall::DEFAULT_DIMENSION_CAP,
            group_step: carnot_core::group::DEFAULT_MAX_STEP,
            group_dim: carnot_core::group::DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// `ε_2, …, ε_κ` as rational strings.
    pub eps: Option<Vec<String>>,
    pub distribution: RationalDistribution,
    pub caps: Caps,
    pub sweep: Option<usize>,
    pub chio_per_size: Option<usize>,
    pub group_samples: Option<usize>,
    pub search_budget: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: Config =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        if !config.distribution.is_valid() {
            return Err(CliError::Usage("distribution needs num_min ≤ num_max and den_max ≥ 1".into()));
        }
        Ok(config)
    }

    pub fn eps(&self) -> Result<Option<Vec<Rational>>, CliError> {
        self.eps
            .as_ref()
            .map(|v| v.iter().map(|s| parse_rational(s).map_err(CliError::from)).collect())
            .transpose()
    }

    pub fn report(&self) -> ReportConfig {
        let d = ReportConfig::default();
        ReportConfig {
            seed: self.seed,
            sweep: self.sweep.unwrap_or(d.sweep),
            chio_per_size: self.chio_per_size.unwrap_or(d.chio_per_size),
            group_samples: self.group_samples.unwrap_or(d.group_samples),
            search_budget: self.search_budget.unwrap_or(d.search_budget),
            distribution: self.distribution,
            tamper: false,
        }
    }
}
