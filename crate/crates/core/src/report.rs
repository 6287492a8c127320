//! Report types shared by the command line and the self-test, plus the strict
//! real-number reader used for every numeric input.

use serde::{Deserialize, Serialize};

use crate::bounds::LyapunovReport;
use crate::error::{Error, Result};
use crate::fredholm::NystromResult;
use crate::green::GreenMaxReport;
use crate::params::FracParams;

/// Parses a finite real in plain decimal or exponent notation.
///
/// Names such as `e`, `pi`, `inf` or `nan` are rejected on purpose so that the
/// constant `e` can never be confused with an exponent marker.
pub fn parse_real(src: &str) -> Result<f64> {
    let s = src.trim();
    let allowed = |c: char| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E');
    if s.is_empty() || !s.chars().all(allowed) || !s.chars().any(|c| c.is_ascii_digit()) {
        return Err(Error::DomainInvalid(format!(
            "`{src}` is not a decimal number (use e.g. 2.718281828459045, not e)"
        )));
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::DomainInvalid(format!("`{src}` overflows a double"))),
        Err(_) => Err(Error::DomainInvalid(format!(
            "`{src}` is not a decimal number"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenPoint {
    pub t: f64,
    pub s: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub path: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub group: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub millis: f64,
    pub limit_ms: f64,
}

impl CriterionResult {
    pub fn within_limit(&self) -> bool {
        self.millis < self.limit_ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Payload {
    Lyapunov(LyapunovReport),
    GreenMax(GreenMaxReport),
    GreenPoint(GreenPoint),
    Grid(GridFile),
    Nystrom(NystromResult),
    Selftest { results: Vec<CriterionResult> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: Option<FracParams>,
    pub payload: Payload,
    pub warnings: Vec<String>,
    pub version: String,
}

impl RunReport {
    pub fn new(command: &str, params: Option<FracParams>, payload: Payload) -> Self {
        RunReport {
            command: command.to_string(),
            params,
            payload,
            warnings: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Pretty JSON. Reals use the shortest representation that reads back to
    /// the same double.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}
