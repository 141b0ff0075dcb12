//! One JSON object per line: per-check records, then a suite summary.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// Passes iff `observed ≤ bound`. NaN never passes.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: Value,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn at_most(check: &str, params: Value, observed: f64, bound: f64) -> Self {
        Self {
            check: check.to_string(),
            params,
            observed,
            bound,
            pass: observed <= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub checks: usize,
    pub failed: usize,
    pub pass: bool,
}

impl SuiteSummary {
    pub fn from_records(suite: &str, records: &[CheckRecord]) -> Self {
        let failed = records.iter().filter(|r| !r.pass).count();
        Self {
            suite: suite.to_string(),
            checks: records.len(),
            failed,
            pass: failed == 0,
        }
    }
}

pub fn emit<T: Serialize>(out: &mut dyn Write, record: &T) -> std::io::Result<()> {
    let line = serde_json::to_string(record).map_err(std::io::Error::other)?;
    writeln!(out, "{line}")
}

/// Running maximum that lets a NaN through, so it fails the final comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst(pub f64);

impl Worst {
    pub fn push(&mut self, x: f64) {
        if x.is_nan() || x > self.0 {
            self.0 = if self.0.is_nan() { self.0 } else { x };
        }
    }
}
