//! Report documents and their JSON / CSV renderings.
//!
//! JSON objects are `serde_json::Map`s, which are `BTreeMap`s here, so keys
//! come out sorted. Floats are emitted with 17 significant digits through
//! `arbitrary_precision` numbers; non-finite values become strings.

use std::str::FromStr;

use altinv_core::{Complex64, InvarianceReport, Scalar};
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1.0";

/// Fixed CSV header.
pub const CSV_COLUMNS: [&str; 9] = ["x", "y", "n", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "status"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

/// One line of a verification report.
#[derive(Clone, Debug)]
pub struct Entry {
    pub check: String,
    pub x: Option<String>,
    pub y: Option<String>,
    pub n: Option<u32>,
    pub lhs: Option<Complex64>,
    pub rhs: Option<Complex64>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    pub reason: Option<String>,
    /// Negative controls are expected to fail the identity; their residual
    /// is reported but kept out of the summary maximum.
    pub control: bool,
}

impl Entry {
    /// A residual check; passes iff `residual ≤ tolerance`.
    pub fn measured(check: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Entry {
            check: check.into(),
            x: None,
            y: None,
            n: None,
            lhs: None,
            rhs: None,
            residual: Some(residual),
            tolerance,
            status: if residual <= tolerance { Status::Pass } else { Status::Fail },
            reason: None,
            control: false,
        }
    }

    /// A negative control: passes iff `residual ≥ threshold`.
    pub fn must_exceed(check: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Entry {
            status: if residual >= threshold { Status::Pass } else { Status::Fail },
            control: true,
            ..Entry::measured(check, residual, threshold)
        }
    }

    /// A check that could not be evaluated: a failure with the error text.
    pub fn failed(check: impl Into<String>, tolerance: f64, reason: impl ToString) -> Self {
        Entry {
            check: check.into(),
            x: None,
            y: None,
            n: None,
            lhs: None,
            rhs: None,
            residual: None,
            tolerance,
            status: Status::Fail,
            reason: Some(reason.to_string()),
            control: false,
        }
    }

    pub fn at(mut self, x: impl ToString, y: Option<&Scalar>, n: Option<u32>) -> Self {
        self.x = Some(x.to_string());
        self.y = y.map(Scalar::to_string);
        self.n = n;
        self
    }

    pub fn sides(mut self, lhs: Complex64, rhs: Complex64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }

    /// Entries of a grid report, labelled with the function name; measured
    /// points are judged against `tolerance`.
    pub fn from_invariance(report: &InvarianceReport) -> Vec<Entry> {
        let name = &report.function;
        let mut out: Vec<Entry> = report
            .entries
            .iter()
            .map(|e| {
                Entry::measured(name.clone(), e.residual, report.tolerance)
                    .at(&e.x, Some(&e.y), Some(e.n))
                    .sides(e.lhs, e.rhs)
            })
            .collect();
        for s in &report.skipped {
            out.push(Entry {
                status: Status::Skip,
                ..Entry::failed(name.clone(), report.tolerance, &s.reason).at(&s.x, Some(&s.y), Some(s.n))
            });
        }
        for s in &report.errors {
            out.push(Entry::failed(name.clone(), report.tolerance, &s.reason).at(&s.x, Some(&s.y), Some(s.n)));
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("check".into(), json!(self.check));
        m.insert("status".into(), json!(self.status.as_str()));
        m.insert("tolerance".into(), num(self.tolerance));
        let opt_str = |v: &Option<String>| v.as_ref().map_or(Value::Null, |s| json!(s));
        m.insert("x".into(), opt_str(&self.x));
        m.insert("y".into(), opt_str(&self.y));
        m.insert("n".into(), self.n.map_or(Value::Null, |n| json!(n)));
        m.insert("lhs".into(), self.lhs.map_or(Value::Null, complex));
        m.insert("rhs".into(), self.rhs.map_or(Value::Null, complex));
        m.insert("residual".into(), self.residual.map_or(Value::Null, num));
        m.insert("reason".into(), opt_str(&self.reason));
        Value::Object(m)
    }

    fn csv_record(&self) -> [String; 9] {
        let f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        [
            self.x.clone().unwrap_or_default(),
            self.y.clone().unwrap_or_default(),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            f(self.lhs.map(|c| c.re)),
            f(self.lhs.map(|c| c.im)),
            f(self.rhs.map(|c| c.re)),
            f(self.rhs.map(|c| c.im)),
            f(self.residual),
            self.status.as_str().to_string(),
        ]
    }
}

/// A verification report.
#[derive(Clone, Debug)]
pub struct Document {
    pub command: String,
    pub entries: Vec<Entry>,
}

impl Document {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    fn summary(&self) -> Value {
        let count = |s: Status| self.entries.iter().filter(|e| e.status == s).count();
        let max = self
            .entries
            .iter()
            .filter(|e| e.status != Status::Skip && !e.control)
            .map(|e| e.residual.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        json!({
            "total": self.entries.len(),
            "passed": count(Status::Pass),
            "failed": count(Status::Fail),
            "skipped": count(Status::Skip),
            "max_residual": num(max),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "entries": self.entries.iter().map(Entry::to_json).collect::<Vec<_>>(),
            "summary": self.summary(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for e in &self.entries {
            w.write_record(e.csv_record()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "Infinity".into()
    } else {
        "-Infinity".into()
    }
}

/// A JSON number with 17 significant digits (a string when non-finite).
pub fn num(v: f64) -> Value {
    let s = fmt_f64(v);
    match Number::from_str(&s) {
        Ok(n) if v.is_finite() => Value::Number(n),
        _ => Value::String(s),
    }
}

pub fn complex(c: Complex64) -> Value {
    json!({ "re": num(c.re), "im": num(c.im) })
}

/// Pretty JSON with a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(f64::INFINITY), json!("Infinity"));
    }

    #[test]
    fn keys_are_sorted() {
        let doc = Document {
            command: "verify".into(),
            entries: vec![Entry::measured("a", 0.0, 1.0)],
        };
        let text = serde_json::to_string(&doc.to_json()).unwrap();
        let keys = ["\"command\"", "\"entries\"", "\"schema_version\"", "\"summary\""];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
    }

    #[test]
    fn csv_has_fixed_header() {
        let doc = Document {
            command: String::new(),
            entries: vec![Entry::measured("a", 0.5, 1.0).at("1/2", Some(&Scalar::int(1)), Some(3))],
        };
        let csv = doc.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "1/2,1,3,,,,,5.0000000000000000e-1,pass");
    }

    #[test]
    fn failures_and_skips_are_counted() {
        let mut skip = Entry::failed("b", 1.0, "lattice");
        skip.status = Status::Skip;
        let doc = Document {
            command: String::new(),
            entries: vec![Entry::measured("a", 2.0, 1.0), skip, Entry::measured("c", 0.0, 1.0)],
        };
        assert!(!doc.passed());
        let s = &doc.to_json()["summary"];
        assert_eq!((s["failed"].as_u64(), s["skipped"].as_u64(), s["passed"].as_u64()), (Some(1), Some(1), Some(1)));
    }
}
