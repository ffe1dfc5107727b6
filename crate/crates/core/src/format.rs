//! Plain-text instance files.
//!
//! ```text
//! # comment
//! instance <T> <departure> [known|revealed]
//! meta <key> <value ...>
//! <i> <j> <v>
//! ```
//!
//! where `<departure>` is one of `const d`, `pervertex d1 .. dT`,
//! `geom delta`, `exp mean` or `empirical d1 d2 ..`.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::market::{DepartureKind, DepartureKnowledge, DepartureModel, DynamicInstance, InstanceError};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing instance header")]
    MissingHeader,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| err(line, format!("cannot parse {what} from {tok:?}")))
}

fn parse_header(line: usize, toks: &[&str]) -> Result<(usize, DepartureModel), FormatError> {
    let mut toks = toks.to_vec();
    let mut knowledge = DepartureKnowledge::KnownAtArrival;
    match toks.last() {
        Some(&"known") => {
            toks.pop();
        }
        Some(&"revealed") => {
            toks.pop();
            knowledge = DepartureKnowledge::RevealedWhenCritical;
        }
        _ => {}
    }
    if toks.len() < 2 {
        return Err(err(line, "header needs a horizon and a departure model"));
    }
    let horizon: usize = num(line, toks[0], "horizon")?;
    let args = &toks[2..];
    let one = |what: &str| -> Result<&str, FormatError> {
        match args {
            [a] => Ok(*a),
            _ => Err(err(line, format!("{} takes exactly one {what}", toks[1]))),
        }
    };
    let list = || -> Result<Vec<u32>, FormatError> { args.iter().map(|t| num(line, t, "deadline")).collect() };
    let model = match toks[1] {
        "const" => DepartureModel::constant(num(line, one("deadline")?, "deadline")?),
        "pervertex" => DepartureModel::per_vertex(list()?),
        "geom" => DepartureModel::geometric(num(line, one("delta")?, "delta")?),
        "exp" => DepartureModel::exponential(num(line, one("mean")?, "mean")?),
        "empirical" => DepartureModel::empirical(list()?),
        other => return Err(err(line, format!("unknown departure model {other:?}"))),
    };
    model
        .validate(horizon)
        .map_err(|e| err(line, e.to_string()))?;
    Ok((horizon, model.with_knowledge(knowledge)))
}

pub fn parse_instance<S: Scalar + FromStr>(text: &str) -> Result<DynamicInstance<S>, FormatError> {
    let mut header: Option<(usize, DepartureModel)> = None;
    let mut meta: Vec<(String, String)> = Vec::new();
    let mut edges: Vec<(usize, usize, S)> = Vec::new();
    let mut edge_lines: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "instance" => {
                if header.is_some() {
                    return Err(err(line, "duplicate instance header"));
                }
                header = Some(parse_header(line, &toks[1..])?);
            }
            "meta" => {
                if toks.len() < 2 {
                    return Err(err(line, "meta needs a key"));
                }
                let rest = content["meta".len()..].trim_start();
                let value = rest[toks[1].len()..].trim();
                meta.push((toks[1].to_string(), value.to_string()));
            }
            _ => {
                if header.is_none() {
                    return Err(err(line, "edge before instance header"));
                }
                if toks.len() != 3 {
                    return Err(err(line, format!("expected `i j v`, found {} fields", toks.len())));
                }
                let i: usize = num(line, toks[0], "vertex")?;
                let j: usize = num(line, toks[1], "vertex")?;
                let v: S = num(line, toks[2], "value")?;
                edges.push((i, j, v));
                edge_lines.push(line);
            }
        }
    }
    let (horizon, model) = header.ok_or(FormatError::MissingHeader)?;
    let mut inst = match DynamicInstance::new(horizon, edges.iter().copied(), model.clone()) {
        Ok(inst) => inst,
        Err(e) => {
            // Point at the first edge that fails on its own, if any.
            for (k, &(i, j, v)) in edges.iter().enumerate() {
                if let Err(e) = DynamicInstance::new(horizon, [(i, j, v)], model.clone()) {
                    return Err(err(edge_lines[k], e.to_string()));
                }
            }
            return Err(e.into());
        }
    };
    for (k, v) in meta {
        inst = inst.with_meta(k, v);
    }
    Ok(inst)
}

fn join(ds: &[u32]) -> String {
    ds.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_instance<S: Scalar>(inst: &DynamicInstance<S>) -> String {
    let dep = inst.departure();
    let model = match &dep.kind {
        DepartureKind::Constant(d) => format!("const {d}"),
        DepartureKind::ExplicitPerVertex(ds) => format!("pervertex {}", join(ds)).trim_end().to_string(),
        DepartureKind::Geometric { delta } => format!("geom {delta}"),
        DepartureKind::Exponential { mean } => format!("exp {mean}"),
        DepartureKind::Empirical(ds) => format!("empirical {}", join(ds)),
    };
    let knowledge = match dep.knowledge {
        DepartureKnowledge::KnownAtArrival => "known",
        DepartureKnowledge::RevealedWhenCritical => "revealed",
    };
    let mut out = format!("instance {} {model} {knowledge}\n", inst.horizon());
    for (k, v) in inst.metadata() {
        let _ = writeln!(out, "meta {k} {v}");
    }
    for (i, j, v) in inst.edges() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}
