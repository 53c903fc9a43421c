//! Layered configuration: built-in defaults, then a JSON file, then flags.
//! Everything is validated here, before any output directory is touched.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use stch::problems::{Problem, ProblemId};
use stch::ScalarizationKind;

use crate::args::{PslArgs, TableArgs, TrainArgs};
use crate::{CliError, CliResult};

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read_object(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(config_err(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(config_err(format!("{}: {e}", path.display()))),
    }
}

fn from_map<T: DeserializeOwned>(map: Map<String, Value>, path: &Path) -> CliResult<T> {
    serde_json::from_value(Value::Object(map)).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Reads a config file into the flag struct of a command; absent path gives
/// all-unset fields.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        Some(p) => from_map(read_object(p)?, p),
        None => Ok(T::default()),
    }
}

fn take<T: DeserializeOwned>(map: &mut Map<String, Value>, key: &str, path: &Path) -> CliResult<Option<T>> {
    match map.remove(key) {
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| config_err(format!("{}: field `{key}`: {e}", path.display()))),
        None => Ok(None),
    }
}

pub fn load_psl(path: Option<&Path>) -> CliResult<PslArgs> {
    let Some(p) = path else { return Ok(PslArgs::default()) };
    let mut map = read_object(p)?;
    let problem = take(&mut map, "problem", p)?;
    let method = take(&mut map, "method", p)?;
    let train: TrainArgs = from_map(map, p)?;
    Ok(PslArgs { config: None, problem, method, train })
}

pub fn load_table(path: Option<&Path>) -> CliResult<TableArgs> {
    let Some(p) = path else { return Ok(TableArgs::default()) };
    let mut map = read_object(p)?;
    let problems = take(&mut map, "problems", p)?;
    let methods = take(&mut map, "methods", p)?;
    let train: TrainArgs = from_map(map, p)?;
    Ok(TableArgs { config: None, problems, methods, train })
}

/// Optimizer a single-preference run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Scalarized(ScalarizationKind),
    Mgda,
}

impl Method {
    pub fn parse(id: &str) -> CliResult<Self> {
        if id.eq_ignore_ascii_case("mgda") {
            return Ok(Method::Mgda);
        }
        ScalarizationKind::from_id(id)
            .map(Method::Scalarized)
            .ok_or_else(|| config_err(format!("unknown method `{id}` (expected ls, tch, stch or mgda)")))
    }

    pub fn id(self) -> &'static str {
        match self {
            Method::Scalarized(k) => k.id(),
            Method::Mgda => "mgda",
        }
    }
}

/// Scalarization for set-model training; MGDA has no set-model variant.
pub fn parse_kind(id: &str) -> CliResult<ScalarizationKind> {
    match Method::parse(id)? {
        Method::Scalarized(k) => Ok(k),
        Method::Mgda => Err(config_err("mgda cannot train a Pareto set model (use ls, tch or stch)")),
    }
}

pub fn parse_problem(name: &str, dim: Option<usize>) -> CliResult<Problem> {
    let id = ProblemId::from_name(name).map_err(|e| config_err(e.to_string()))?;
    match dim {
        Some(n) if id.is_synthetic() => Problem::with_dim(id, n).map_err(|e| config_err(e.to_string())),
        Some(_) => Err(config_err(format!("--dim only applies to F1–F6, not {}", id.name()))),
        None => Ok(Problem::new(id)),
    }
}

pub fn require<T>(value: Option<T>, name: &str) -> CliResult<T> {
    value.ok_or_else(|| config_err(format!("missing required `{name}`")))
}

pub fn positive(value: f64, name: &str) -> CliResult<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(config_err(format!("`{name}` must be positive and finite, got {value}")))
    }
}

pub fn at_least(value: usize, min: usize, name: &str) -> CliResult<usize> {
    if value >= min {
        Ok(value)
    } else {
        Err(config_err(format!("`{name}` must be >= {min}, got {value}")))
    }
}

/// Smallest reference front resolution the core accepts.
pub const MIN_RESOLUTION: usize = 100;
pub const DEFAULT_RESOLUTION: usize = 1000;

pub fn resolution(value: Option<usize>) -> CliResult<usize> {
    at_least(value.unwrap_or(DEFAULT_RESOLUTION), MIN_RESOLUTION, "resolution")
}

pub fn out_dir(value: Option<PathBuf>, default: &str) -> PathBuf {
    value.unwrap_or_else(|| PathBuf::from(default))
}
