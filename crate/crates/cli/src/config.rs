//! Settings from an optional TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use natcalc::{Limits, Universe, Value};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// TOML configuration file
    #[arg(long, global = true, env = "NATCALC_CONFIG")]
    pub config: Option<PathBuf>,
    /// Number of public channels
    #[arg(long, global = true)]
    pub pool: Option<u32>,
    /// Fresh channels available along one derivation
    #[arg(long, global = true)]
    pub fresh_budget: Option<usize>,
    /// Reification depth
    #[arg(long, global = true)]
    pub depth_budget: Option<usize>,
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Seed for sampled relations and random walks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    universe: UniverseSection,
    #[serde(default)]
    limits: LimitsSection,
    seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct UniverseSection {
    data: Option<Vec<DataValue>>,
    pool: Option<u32>,
    fresh_budget: Option<usize>,
    depth_budget: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct LimitsSection {
    max_states: Option<usize>,
    max_depth: Option<usize>,
}

/// Data values in TOML: `"()"`, booleans, naturals and two-element arrays.
#[derive(Deserialize)]
#[serde(untagged)]
enum DataValue {
    Bool(bool),
    Nat(u64),
    Text(String),
    Pair(Vec<DataValue>),
}

impl DataValue {
    fn to_value(&self) -> Result<Value, String> {
        match self {
            DataValue::Bool(b) => Ok(Value::Bool(*b)),
            DataValue::Nat(n) => Ok(Value::Nat(*n)),
            DataValue::Text(t) if t == "()" => Ok(Value::Unit),
            DataValue::Text(t) => Err(format!("unknown data value {t:?}")),
            DataValue::Pair(items) => match items.as_slice() {
                [a, b] => Ok(Value::pair(a.to_value()?, b.to_value()?)),
                _ => Err("pairs need exactly two components".into()),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub data: Vec<Value>,
    pub pool: u32,
    pub fresh_budget: usize,
    pub depth_budget: usize,
    pub limits: Limits,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            data: vec![Value::Unit],
            pool: 2,
            fresh_budget: 3,
            depth_budget: 6,
            limits: Limits { max_states: 2000, max_depth: 64 },
            seed: 0,
        }
    }
}

impl Config {
    pub fn load(args: &ConfigArgs) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = args.pool {
            cfg.pool = v;
        }
        if let Some(v) = args.fresh_budget {
            cfg.fresh_budget = v;
        }
        if let Some(v) = args.depth_budget {
            cfg.depth_budget = v;
        }
        if let Some(v) = args.max_states {
            cfg.limits.max_states = v;
        }
        if let Some(v) = args.max_depth {
            cfg.limits.max_depth = v;
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if cfg.limits.max_states == 0 || cfg.limits.max_depth == 0 {
            return Err(CliError::Input("limits must be positive".into()));
        }
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        let file: FileConfig =
            toml::from_str(&text).map_err(|source| CliError::Config { path: path.into(), source })?;
        if let Some(data) = &file.universe.data {
            self.data = data
                .iter()
                .map(DataValue::to_value)
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        }
        let u = file.universe;
        self.pool = u.pool.unwrap_or(self.pool);
        self.fresh_budget = u.fresh_budget.unwrap_or(self.fresh_budget);
        self.depth_budget = u.depth_budget.unwrap_or(self.depth_budget);
        self.limits.max_states = file.limits.max_states.unwrap_or(self.limits.max_states);
        self.limits.max_depth = file.limits.max_depth.unwrap_or(self.limits.max_depth);
        self.seed = file.seed.unwrap_or(self.seed);
        Ok(())
    }

    /// The universe for terms over `free` named channels. The pool grows to
    /// cover them, since named channels must be public.
    pub fn universe(&self, free: usize) -> Result<Universe, CliError> {
        let pool = self.pool.max(free as u32);
        Ok(Universe::new(self.data.iter().cloned(), pool, self.fresh_budget, self.depth_budget)?)
    }
}
