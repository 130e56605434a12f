//! Check reports and their serialization.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::fock::{FockVector, Partition};
use crate::scalar::Scalar;
use crate::series::SeriesError;

/// Only this many mismatches are kept verbatim; the total is always counted.
pub const MAX_RECORDED_MISMATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "window-insufficient")]
    WindowInsufficient,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::WindowInsufficient => "window-insufficient",
        }
    }
}

/// One coefficient where the two sides of an identity disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub monomial: Vec<i64>,
    /// Output basis monomial for vector-valued coefficients.
    pub component: Option<Partition>,
    pub lhs: String,
    pub rhs: String,
    pub target: FockVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    #[serde(rename = "check-id")]
    pub check_id: String,
    pub params: Value,
    pub status: Status,
    pub compared: usize,
    #[serde(rename = "mismatch-count")]
    pub mismatch_count: usize,
    pub mismatches: Vec<Mismatch>,
    pub details: Value,
    pub error: Option<String>,
    #[serde(rename = "elapsed-ms")]
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report is serializable")
    }

    pub fn detail(&self, key: &str) -> Option<&Value> {
        self.details.get(key)
    }
}

/// Accumulates comparisons for one check.
#[derive(Debug, Default)]
pub struct Comparator {
    compared: usize,
    mismatch_count: usize,
    mismatches: Vec<Mismatch>,
    details: serde_json::Map<String, Value>,
    error: Option<(Status, String)>,
}

impl Comparator {
    pub fn new() -> Self {
        Comparator::default()
    }

    pub fn count_compared(&mut self, n: usize) {
        self.compared += n;
    }

    pub fn mismatch_count(&self) -> usize {
        self.mismatch_count
    }

    fn push(&mut self, m: Mismatch) {
        self.mismatch_count += 1;
        if self.mismatches.len() < MAX_RECORDED_MISMATCHES {
            self.mismatches.push(m);
        }
    }

    pub fn scalar_mismatch(&mut self, monomial: Vec<i64>, lhs: &Scalar, rhs: &Scalar) {
        self.push(Mismatch {
            monomial,
            component: None,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            target: FockVector::zero(),
        });
    }

    /// Compare two scalars, recording a mismatch if they differ.
    pub fn compare_scalars(&mut self, monomial: &[i64], lhs: &Scalar, rhs: &Scalar) {
        self.compared += 1;
        if lhs != rhs {
            self.scalar_mismatch(monomial.to_vec(), lhs, rhs);
        }
    }

    /// Compare two vectors componentwise.
    pub fn compare_vectors(&mut self, monomial: &[i64], target: &FockVector, lhs: &FockVector, rhs: &FockVector) {
        self.compared += 1;
        if lhs == rhs {
            return;
        }
        let diff = lhs.sub(rhs);
        for (p, _) in diff.terms() {
            self.push(Mismatch {
                monomial: monomial.to_vec(),
                component: Some(p.clone()),
                lhs: lhs.coeff(p).to_string(),
                rhs: rhs.coeff(p).to_string(),
                target: target.clone(),
            });
        }
    }

    pub fn set_detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.to_string(), value);
    }

    /// Record a series error; window problems get their own status.
    pub fn record_error(&mut self, e: &SeriesError) {
        let status = match e {
            SeriesError::WindowInsufficient(_) => Status::WindowInsufficient,
            _ => Status::Fail,
        };
        if self.error.is_none() {
            self.error = Some((status, e.to_string()));
        }
    }

    pub fn fail_with(&mut self, msg: impl Into<String>) {
        if self.error.is_none() {
            self.error = Some((Status::Fail, msg.into()));
        }
    }

    pub fn into_report(self, check_id: &str, params: Value, started: Instant) -> CheckReport {
        let (status, error) = match (self.mismatch_count, self.error) {
            (0, None) => (Status::Pass, None),
            (0, Some((s, e))) => (s, Some(e)),
            (_, e) => (Status::Fail, e.map(|x| x.1)),
        };
        CheckReport {
            check_id: check_id.to_string(),
            params,
            status,
            compared: self.compared,
            mismatch_count: self.mismatch_count,
            mismatches: self.mismatches,
            details: Value::Object(self.details),
            error,
            elapsed_ms: started.elapsed().as_millis() as u64,
        }
    }
}

/// Run a fallible check body and turn its outcome into a report.
pub fn run_check<F>(check_id: &str, params: Value, body: F) -> CheckReport
where
    F: FnOnce(&mut Comparator) -> Result<(), SeriesError>,
{
    let started = Instant::now();
    let mut cmp = Comparator::new();
    if let Err(e) = body(&mut cmp) {
        cmp.record_error(&e);
    }
    cmp.into_report(check_id, params, started)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json-lines" | "jsonl" | "json" => Ok(Format::JsonLines),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format {other:?} (expected json-lines or table)")),
        }
    }
}

/// Serialize reports; `timing = false` zeroes `elapsed-ms` so output is
/// byte-identical across runs.
pub fn emit_reports(reports: &[CheckReport], format: Format, timing: bool) -> String {
    let mut out = String::new();
    match format {
        Format::JsonLines => {
            for r in reports {
                let mut r = r.clone();
                if !timing {
                    r.elapsed_ms = 0;
                }
                out.push_str(&r.to_json_line());
                out.push('\n');
            }
        }
        Format::Table => {
            let _ =
                writeln!(out, "{:<16} {:<20} {:>9} {:>10} {:>10}", "check", "status", "compared", "mismatches", "ms");
            for r in reports {
                let ms = if timing { r.elapsed_ms } else { 0 };
                let _ = writeln!(
                    out,
                    "{:<16} {:<20} {:>9} {:>10} {:>10}",
                    r.check_id,
                    r.status.as_str(),
                    r.compared,
                    r.mismatch_count,
                    ms
                );
                if let Some(m) = r.mismatches.first() {
                    let comp = m.component.as_ref().map(|p| format!(" component {:?}", p.parts())).unwrap_or_default();
                    let _ = writeln!(out, "    first mismatch at {:?}{comp}: lhs {} rhs {}", m.monomial, m.lhs, m.rhs);
                }
                if let Some(e) = &r.error {
                    let _ = writeln!(out, "    error: {e}");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_strings_and_key_order() {
        let mut c = Comparator::new();
        c.compare_scalars(&[1, -1], &Scalar::ratio(-1, 24), &Scalar::zero());
        let r = c.into_report("X", serde_json::json!({}), Instant::now());
        assert_eq!(r.status, Status::Fail);
        let line = emit_reports(&[r], Format::JsonLines, false);
        assert!(line.starts_with(r#"{"check-id":"X","params":{},"status":"fail""#), "{line}");
        assert!(line.contains(r#""lhs":"-1/24","rhs":"0""#));
        assert!(line.trim_end().ends_with(r#""elapsed-ms":0}"#));
    }

    #[test]
    fn window_errors_have_their_own_status() {
        let r = run_check("W", Value::Null, |_| Err(SeriesError::WindowInsufficient("x".into())));
        assert_eq!(r.status, Status::WindowInsufficient);
        let r = run_check("P", Value::Null, |c| {
            c.compare_scalars(&[], &Scalar::one(), &Scalar::one());
            Ok(())
        });
        assert!(r.passed());
    }
}
