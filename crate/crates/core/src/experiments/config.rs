//! Flat TOML description of a user sweep.
//!
//! ```toml
//! name = "wide_machines"
//! sweep = "rho"            # or "n"
//! grid_lo = 0.0
//! grid_hi = 0.5
//! grid_points = 11
//! instance = "fixed"       # fixed | dimension_growth | machine_growth
//! n = 10000
//! m = 200
//! d = 50
//! tests = ["ChiSqCount", "SignCount"]
//! replications = 200
//! alpha = 0.05
//! seed = 7
//! threshold = "exact_binomial"
//! ```

use std::path::Path;

use serde::Deserialize;

use super::spec::{ExperimentSpec, InstanceRule, Sweep, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::protocol::{CountThreshold, TestKind};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    sweep: String,
    grid_lo: f64,
    grid_hi: f64,
    grid_points: usize,
    instance: String,
    n: Option<u64>,
    m: Option<u64>,
    d: Option<usize>,
    fraction: Option<f64>,
    tests: Option<Vec<String>>,
    replications: Option<u64>,
    alpha: Option<f64>,
    seed: Option<u64>,
    threshold: Option<String>,
}

fn required<T>(value: Option<T>, key: &str, rule: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidSpec(format!("`{rule}` instances need `{key}`")))
}

fn unused<T>(value: &Option<T>, key: &str, rule: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::InvalidSpec(format!("`{key}` is not used by `{rule}` instances"))),
        None => Ok(()),
    }
}

impl RawConfig {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let (lo, hi, points) = (self.grid_lo, self.grid_hi, self.grid_points);
        let sweep = match self.sweep.as_str() {
            "rho" => Sweep::RhoGrid { lo, hi, points },
            "n" => Sweep::NGrid { lo, hi, points },
            other => return Err(Error::InvalidSpec(format!("unknown sweep `{other}`"))),
        };
        let rule = self.instance.as_str();
        let instance_rule = match rule {
            "fixed" => {
                unused(&self.fraction, "fraction", rule)?;
                InstanceRule::Fixed {
                    n: required(self.n, "n", rule)?,
                    m: required(self.m, "m", rule)?,
                    d: required(self.d, "d", rule)?,
                }
            }
            "dimension_growth" => {
                unused(&self.n, "n", rule)?;
                unused(&self.d, "d", rule)?;
                unused(&self.fraction, "fraction", rule)?;
                InstanceRule::DimensionGrowth { m: required(self.m, "m", rule)? }
            }
            "machine_growth" => {
                unused(&self.n, "n", rule)?;
                unused(&self.m, "m", rule)?;
                InstanceRule::MachineGrowth {
                    d: required(self.d, "d", rule)?,
                    fraction: required(self.fraction, "fraction", rule)?,
                }
            }
            other => return Err(Error::InvalidSpec(format!("unknown instance rule `{other}`"))),
        };
        let tests = match self.tests {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<TestKind>>>()?,
            None => vec![TestKind::ChiSqCount, TestKind::SignCount],
        };
        let threshold_rule = match self.threshold {
            Some(s) => s.parse()?,
            None => CountThreshold::default(),
        };
        let spec = ExperimentSpec {
            name: self.name,
            sweep,
            instance_rule,
            tests,
            replications: self.replications.unwrap_or(100),
            alpha: self.alpha.unwrap_or(0.05),
            root_seed: self.seed.unwrap_or(DEFAULT_SEED),
            threshold_rule,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses and validates a sweep description.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    raw.into_spec()
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text)
}
