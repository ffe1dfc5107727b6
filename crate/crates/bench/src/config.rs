//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//! reps = 10
//! algorithms = ["greedy", "patient", "batching:50", "reopt", "mdda"]
//! deadlines = [50, 100]
//! modes = ["det", "stoch"]
//! opt = "auto"
//!
//! [instance]
//! family = "trips"
//! params = { n = 2000, pool = 5000 }
//!
//! [output]
//! summary = "summary.tsv"
//! detail = "detail.tsv"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use dynmatch::Algorithm;

pub const SEED_ENV: &str = "DYNMATCH_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

/// When to compute the offline optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptPolicy {
    /// Only when an exact method applies.
    #[default]
    Auto,
    /// Also report the labelled heuristic value on large instances.
    Heuristic,
    Off,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    /// A generator family; `params` supplies its parameters.
    pub family: Option<String>,
    /// A fixed instance file.
    pub file: Option<PathBuf>,
    /// A trip CSV sampled like the `trips` family; needs `n` in `params`.
    pub trips_csv: Option<PathBuf>,
    #[serde(default)]
    pub params: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub summary: Option<PathBuf>,
    pub detail: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    #[serde(default = "one")]
    pub reps: usize,
    #[serde(default)]
    pub algorithms: Vec<String>,
    pub instance: InstanceSource,
    /// Deadline sweep; each value becomes the `d` parameter.
    #[serde(default)]
    pub deadlines: Vec<u32>,
    /// Departure-mode sweep (`det`, `stoch`).
    #[serde(default)]
    pub modes: Vec<String>,
    #[serde(default)]
    pub opt: OptPolicy,
    #[serde(default)]
    pub output: OutputPaths,
}

fn one() -> usize {
    1
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: BenchConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies the seed override from the
    /// environment. Relative paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        if let Ok(raw) = std::env::var(SEED_ENV) {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{SEED_ENV}={raw:?} is not a u64")))?;
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        rebase(&mut cfg.instance.file);
        rebase(&mut cfg.instance.trips_csv);
        rebase(&mut cfg.output.summary);
        rebase(&mut cfg.output.detail);
        Ok(cfg)
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, ConfigError> {
        self.algorithms
            .iter()
            .map(|a| a.parse().map_err(|e| ConfigError::Invalid(format!("algorithms: {e}"))))
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let src = &self.instance;
        let sources = [src.family.is_some(), src.file.is_some(), src.trips_csv.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(ConfigError::Invalid(
                "[instance] needs exactly one of family, file, trips_csv".into(),
            ));
        }
        if self.reps == 0 {
            return Err(ConfigError::Invalid("reps must be positive".into()));
        }
        self.algorithms()?;
        for m in &self.modes {
            if !matches!(m.as_str(), "det" | "deterministic" | "stoch" | "stochastic" | "exp") {
                return Err(ConfigError::Invalid(format!("modes: unknown mode {m:?}")));
            }
        }
        if self.deadlines.contains(&0) {
            return Err(ConfigError::Invalid("deadlines must be positive".into()));
        }
        Ok(())
    }
}

/// Renders a TOML scalar the way generator parameters expect it.
pub(crate) fn param_text(v: &toml::Value) -> Result<String, ConfigError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(ConfigError::Invalid(format!("parameter value {other} is not a scalar"))),
    }
}
