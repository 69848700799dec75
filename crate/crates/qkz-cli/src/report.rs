//! Machine-readable run reports.

use serde::Serialize;
use serde_json::Value;

use crate::config::ConfigEcho;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check's hypotheses do not hold for this parameter set.
    NotApplicable,
    /// The computation itself failed.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: &'static str,
    pub suite: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl CheckRecord {
    pub fn new(name: &'static str, suite: &'static str, status: Status) -> Self {
        CheckRecord { name, suite, status, residual: None, bound: None, witness: None, details: None }
    }

    pub fn verdict(name: &'static str, suite: &'static str, passed: bool) -> Self {
        Self::new(name, suite, if passed { Status::Pass } else { Status::Fail })
    }

    /// Pass iff `residual < bound`.
    pub fn bounded(name: &'static str, suite: &'static str, residual: f64, bound: f64) -> Self {
        CheckRecord { residual: Some(residual), bound: Some(bound), ..Self::verdict(name, suite, residual < bound) }
    }

    pub fn skipped(name: &'static str, suite: &'static str, why: impl Into<String>) -> Self {
        CheckRecord { witness: Some(why.into()), ..Self::new(name, suite, Status::NotApplicable) }
    }

    pub fn failed(name: &'static str, suite: &'static str, err: impl std::fmt::Display) -> Self {
        CheckRecord { witness: Some(err.to_string()), ..Self::new(name, suite, Status::Error) }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn with_details(mut self, d: Value) -> Self {
        self.details = Some(d);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub name: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub suite: &'static str,
    pub precision_digits: usize,
    pub validation: Validation,
    pub checks: Vec<CheckRecord>,
    /// No check failed or errored.
    pub passed: bool,
    /// Wall-clock times; present only on request since they break
    /// byte-identical reruns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<Timing>>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
