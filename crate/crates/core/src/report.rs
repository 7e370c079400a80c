use std::collections::BTreeMap;

use serde::Serialize;

/// One verified quantity. Numbers are stored as shortest round-trip decimal
/// strings so reports compare bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub check: String,
    pub parameters: BTreeMap<String, String>,
    pub observed: String,
    pub expected: String,
    pub tolerance: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

impl RunReport {
    pub fn new(scenario: String, seed: u64, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
        };
        Self {
            scenario,
            seed,
            records,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0 && self.summary.total > 0
    }

    pub fn record(&self, id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Collects the records of one check.
#[derive(Debug)]
pub(crate) struct Recorder {
    prefix: String,
    check: &'static str,
    parameters: BTreeMap<String, String>,
    pub(crate) records: Vec<CheckRecord>,
}

impl Recorder {
    pub(crate) fn new(index: usize, check: &'static str) -> Self {
        Self {
            prefix: format!("{index:02}.{check}"),
            check,
            parameters: BTreeMap::new(),
            records: Vec::new(),
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn push(
        &mut self,
        sub: &str,
        observed: String,
        expected: String,
        tolerance: String,
        pass: bool,
    ) {
        self.records.push(CheckRecord {
            id: format!("{}.{sub}", self.prefix),
            check: self.check.to_string(),
            parameters: self.parameters.clone(),
            observed,
            expected,
            tolerance,
            pass,
            wall_time_ms: None,
        });
    }

    /// `observed ≤ tolerance` for a nonnegative defect.
    pub(crate) fn at_most(&mut self, sub: &str, observed: f64, tolerance: f64) {
        self.push(
            sub,
            num(observed),
            num(0.0),
            num(tolerance),
            observed <= tolerance,
        );
    }

    /// `|observed − expected| ≤ tolerance`.
    pub(crate) fn close(&mut self, sub: &str, observed: f64, expected: f64, tolerance: f64) {
        let pass = (observed - expected).abs() <= tolerance;
        self.push(sub, num(observed), num(expected), num(tolerance), pass);
    }

    /// `observed > bound − tolerance`.
    pub(crate) fn above(&mut self, sub: &str, observed: f64, bound: f64, tolerance: f64) {
        let pass = observed > bound - tolerance;
        self.push(sub, num(observed), num(bound), num(tolerance), pass);
    }

    pub(crate) fn equal<T: PartialEq + std::fmt::Debug>(
        &mut self,
        sub: &str,
        observed: T,
        expected: T,
    ) {
        let pass = observed == expected;
        self.push(
            sub,
            format!("{observed:?}"),
            format!("{expected:?}"),
            "exact".into(),
            pass,
        );
    }

    pub(crate) fn error(&mut self, sub: &str, message: String) {
        self.push(
            sub,
            format!("error: {message}"),
            "no error".into(),
            "exact".into(),
            false,
        );
    }

    pub(crate) fn finish(mut self, wall_time_ms: Option<f64>) -> Vec<CheckRecord> {
        for r in &mut self.records {
            r.wall_time_ms = wall_time_ms;
        }
        self.records
    }
}
