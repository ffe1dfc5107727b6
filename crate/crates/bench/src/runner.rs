//! Executes every (setting, replication, algorithm) run of a config.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use dynmatch::algorithms::AlgorithmError;
use dynmatch::coins::replicate_seeds;
use dynmatch::data::{ingest_trips, read_trip_csv, DataError, TripRecord};
use dynmatch::format::{parse_instance, FormatError};
use dynmatch::generators::{DepartureMode, GenError, GeneratorSpec};
use dynmatch::oracle::{offline_opt, EXHAUSTIVE_LIMIT};
use dynmatch::{Algorithm, DynamicInstance, InstanceError};

use crate::config::{param_text, BenchConfig, ConfigError, InstanceSource, OptPolicy};
use crate::report::{Report, RunRecord};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{algorithm}: {source}")]
    Algorithm { algorithm: String, source: AlgorithmError },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One point of the deadline × mode sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub d: Option<u32>,
    pub mode: Option<DepartureMode>,
}

impl Setting {
    pub fn label(&self) -> String {
        match (self.d, self.mode) {
            (None, None) => "base".into(),
            (Some(d), None) => format!("d={d}"),
            (None, Some(m)) => format!("mode={m}"),
            (Some(d), Some(m)) => format!("d={d} mode={m}"),
        }
    }
}

/// One instance draw: a setting and a replication seed.
#[derive(Debug, Clone)]
pub struct Cell {
    pub setting: Setting,
    pub rep: usize,
    pub seed: u64,
}

enum Source {
    Family(String),
    File(DynamicInstance<f64>),
    Trips(Vec<TripRecord>),
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_source(src: &InstanceSource) -> Result<Source, BenchError> {
    if let Some(f) = &src.family {
        Ok(Source::Family(f.clone()))
    } else if let Some(path) = &src.file {
        Ok(Source::File(parse_instance(&read(path)?)?))
    } else {
        let path = src.trips_csv.as_ref().expect("validated source");
        let file = std::fs::File::open(path).map_err(|source| BenchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Source::Trips(read_trip_csv(std::io::BufReader::new(file))?))
    }
}

fn family_takes(family: &str, key: &str) -> bool {
    match key {
        "seed" => matches!(family, "random" | "trips" | "compat"),
        "d" => matches!(family, "random" | "trips" | "compat"),
        "mode" => matches!(family, "trips" | "compat"),
        _ => false,
    }
}

fn build_instance(src: &Source, cfg: &BenchConfig, cell: &Cell) -> Result<DynamicInstance<f64>, BenchError> {
    let d = cell.setting.d;
    let mode = cell.setting.mode.unwrap_or(DepartureMode::Deterministic);
    match src {
        Source::Family(family) => {
            let mut params: Vec<(String, String)> = Vec::new();
            for (k, v) in &cfg.instance.params {
                if !family_takes(family, k) {
                    params.push((k.clone(), param_text(v)?));
                }
            }
            let fixed = |k: &str| cfg.instance.params.get(k).map(param_text).transpose();
            if family_takes(family, "seed") {
                params.push(("seed".into(), cell.seed.to_string()));
            }
            if family_takes(family, "d") {
                if let Some(v) = d.map(|x| x.to_string()).or(fixed("d")?) {
                    params.push(("d".into(), v));
                }
            }
            if family_takes(family, "mode") {
                let m = cell.setting.mode.map(|m| m.to_string()).or(fixed("mode")?);
                if let Some(m) = m {
                    params.push(("mode".into(), m));
                }
            }
            let spec = GeneratorSpec::parse(family, params.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
            Ok(spec.generate()?)
        }
        Source::File(inst) => match d {
            Some(d) => Ok(inst.with_departure(mode.model(d))?),
            None => Ok(inst.clone()),
        },
        Source::Trips(records) => {
            let n = cfg
                .instance
                .params
                .get("n")
                .and_then(toml::Value::as_integer)
                .ok_or_else(|| ConfigError::Invalid("trips_csv needs an integer params.n".into()))?;
            let d = match d {
                Some(d) => d,
                None => cfg
                    .instance
                    .params
                    .get("d")
                    .and_then(toml::Value::as_integer)
                    .ok_or_else(|| ConfigError::Invalid("trips_csv needs a deadline".into()))? as u32,
            };
            Ok(ingest_trips(records, n as usize, &mode.model(d), cell.seed)?)
        }
    }
}

fn run_cell(
    src: &Source,
    cfg: &BenchConfig,
    algorithms: &[Algorithm],
    cell: &Cell,
) -> Result<Vec<RunRecord>, BenchError> {
    let inst = build_instance(src, cfg, cell)?;
    let deadlines = inst.deadlines_for_seed(cell.seed);
    let opt = match cfg.opt {
        OptPolicy::Off => None,
        OptPolicy::Auto if inst.horizon() > EXHAUSTIVE_LIMIT && inst.roles().is_none() => None,
        _ => {
            let o = offline_opt(&inst, &deadlines);
            (o.method.is_exact() || cfg.opt == OptPolicy::Heuristic).then_some(o)
        }
    };
    algorithms
        .iter()
        .map(|algo| {
            let start = Instant::now();
            let run = algo
                .run_with_deadlines(&inst, &deadlines, cell.seed)
                .map_err(|source| BenchError::Algorithm {
                    algorithm: algo.to_string(),
                    source,
                })?;
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(RunRecord {
                setting: cell.setting.label(),
                rep: cell.rep,
                seed: cell.seed,
                algorithm: algo.to_string(),
                value: run.total_value,
                opt: opt.as_ref().map(|o| o.value),
                opt_method: opt.as_ref().map(|o| o.method.to_string()),
                matched_fraction: run.matched_fraction(),
                runtime_ms,
                audits_pass: run.audits_pass(),
            })
        })
        .collect()
}

/// The sweep in report order: deadlines outermost, then modes.
pub fn settings(cfg: &BenchConfig) -> Vec<Setting> {
    let ds: Vec<Option<u32>> = if cfg.deadlines.is_empty() {
        vec![None]
    } else {
        cfg.deadlines.iter().copied().map(Some).collect()
    };
    let modes: Vec<Option<DepartureMode>> = if cfg.modes.is_empty() {
        vec![None]
    } else {
        cfg.modes.iter().map(|m| Some(m.parse().expect("validated mode"))).collect()
    };
    ds.iter()
        .flat_map(|&d| modes.iter().map(move |&mode| Setting { d, mode }))
        .collect()
}

/// Runs all cells, in parallel, and assembles the report in a fixed order
/// that does not depend on scheduling.
pub fn run_experiment(cfg: &BenchConfig) -> Result<Report, BenchError> {
    let algorithms = cfg.algorithms()?;
    if algorithms.is_empty() {
        return Ok(Report::default());
    }
    let src = load_source(&cfg.instance)?;
    let seeds = replicate_seeds(cfg.seed, cfg.reps);
    let cells: Vec<Cell> = settings(cfg)
        .into_iter()
        .flat_map(|setting| {
            seeds.iter().enumerate().map(move |(rep, &seed)| Cell {
                setting: setting.clone(),
                rep,
                seed,
            })
        })
        .collect();
    let per_cell: Vec<Vec<RunRecord>> = cells
        .par_iter()
        .map(|cell| run_cell(&src, cfg, &algorithms, cell))
        .collect::<Result<_, _>>()?;
    Ok(Report::from_records(per_cell.into_iter().flatten().collect()))
}
