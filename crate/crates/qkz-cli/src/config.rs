//! JSON parameter files.
//!
//! ```json
//! {"lambdas": ["1/2", "1/2", "1/2"],
//!  "z": [["1/10", "-4"], ["-1/5", "1"], ["3/10", "6"]],
//!  "p": "-3", "l": 1, "k": 1}
//! ```
//!
//! Rationals are strings (`"a/b"`, integers or exact decimals); bare JSON
//! integers are accepted too. `k` is optional.

use std::fs;
use std::path::{Path, PathBuf};

use qkz::params::{describe, validate, ParamSet};
use qkz::scalars::{format_gauss, format_rational, gauss, parse_rational, ParseError, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field {field}: {source}")]
    Rational { field: String, source: ParseError },
    #[error("{0}")]
    Shape(String),
    #[error("parameters fail validation:\n{0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Int(i64),
}

impl Literal {
    fn parse(&self, field: &str) -> Result<Rational, ConfigError> {
        match self {
            Literal::Int(n) => Ok(Rational::from_integer((*n).into())),
            Literal::Text(s) => parse_rational(s).map_err(|source| ConfigError::Rational { field: field.to_string(), source }),
        }
    }
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambdas: Vec<Literal>,
    pub z: Vec<[Literal; 2]>,
    pub p: Literal,
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// Normalized echo of a parameter set, as it appears in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub lambdas: Vec<String>,
    pub z: Vec<[String; 2]>,
    pub p: String,
    pub l: usize,
    pub k: Option<usize>,
}

impl ConfigEcho {
    pub fn of(ps: &ParamSet) -> Self {
        ConfigEcho {
            lambdas: ps.lambdas.iter().map(format_rational).collect(),
            z: ps.zs.iter().map(format_gauss).collect(),
            p: format_rational(&ps.p),
            l: ps.l,
            k: ps.k,
        }
    }
}

impl ConfigFile {
    pub fn to_params(&self) -> Result<ParamSet, ConfigError> {
        if self.lambdas.is_empty() {
            return Err(ConfigError::Shape("at least one weight is required".into()));
        }
        if self.lambdas.len() != self.z.len() {
            return Err(ConfigError::Shape(format!(
                "{} weights but {} positions",
                self.lambdas.len(),
                self.z.len()
            )));
        }
        let lambdas = self
            .lambdas
            .iter()
            .enumerate()
            .map(|(i, l)| l.parse(&format!("lambdas[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let zs = self
            .z
            .iter()
            .enumerate()
            .map(|(i, [re, im])| Ok(gauss(re.parse(&format!("z[{i}].re"))?, im.parse(&format!("z[{i}].im"))?)))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let p = self.p.parse("p")?;
        Ok(ParamSet::new(lambdas, zs, p, self.l, self.k))
    }
}

pub fn parse_config(text: &str) -> Result<ParamSet, ConfigError> {
    serde_json::from_str::<ConfigFile>(text)?.to_params()
}

pub fn load_config(path: &Path) -> Result<ParamSet, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

/// Rejects parameter sets failing the genericity conditions.
pub fn require_valid(ps: &ParamSet) -> Result<(), ConfigError> {
    let report = validate(ps);
    if report.passed() {
        Ok(())
    } else {
        Err(ConfigError::Validation(describe(&report)))
    }
}
