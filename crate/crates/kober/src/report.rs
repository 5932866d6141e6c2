//! Suite reports and tables, with JSON and CSV writers.
//!
//! Every case passes when `|got − expected| ≤ tol`; `tol` is an absolute
//! bound already scaled by the case's relative tolerance or standard error.

use std::fmt::Display;

use kober_core::mc::Estimate;
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::num::{fmt12, sig12};

fn num12<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_f64(sig12(*v)),
        _ => s.serialize_none(),
    }
}

/// One checked value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub id: String,
    /// The identity or closed form the case exercises.
    pub paper_ref: String,
    #[serde(serialize_with = "num12")]
    pub expected: Option<f64>,
    #[serde(serialize_with = "num12")]
    pub got: Option<f64>,
    #[serde(serialize_with = "num12")]
    pub se: Option<f64>,
    #[serde(serialize_with = "num12")]
    pub tol: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Case {
    fn base(id: impl Into<String>, reference: &str) -> Self {
        Case {
            id: id.into(),
            paper_ref: reference.to_owned(),
            expected: None,
            got: None,
            se: None,
            tol: None,
            pass: false,
            detail: None,
        }
    }

    /// `|got − expected| ≤ tol` with an absolute `tol`.
    pub fn abs(id: impl Into<String>, reference: &str, expected: f64, got: f64, se: Option<f64>, tol: f64) -> Self {
        let pass = (got - expected).abs() <= tol;
        Case { expected: Some(expected), got: Some(got), se, tol: Some(tol), pass, ..Self::base(id, reference) }
    }

    /// Relative tolerance `rel` on `expected`.
    pub fn rel(id: impl Into<String>, reference: &str, expected: f64, got: f64, rel: f64) -> Self {
        Self::abs(id, reference, expected, got, None, rel * expected.abs())
    }

    /// Within `k` standard errors of `expected`, and within `cap` relative
    /// when given.
    pub fn mc(id: impl Into<String>, reference: &str, expected: f64, est: &Estimate, k: f64, cap: Option<f64>) -> Self {
        let mut tol = k * est.se;
        if let Some(c) = cap {
            tol = tol.min(c * expected.abs());
        }
        let mut case = Self::abs(id, reference, expected, est.mean, Some(est.se), tol);
        if !est.converged {
            case.pass = false;
            case.detail = Some("standard error did not converge".into());
        }
        case
    }

    /// A case whose computation failed.
    pub fn error(id: impl Into<String>, reference: &str, expected: Option<f64>, err: impl Display) -> Self {
        Case { expected, detail: Some(err.to_string()), ..Self::base(id, reference) }
    }

    /// A yes/no property.
    pub fn flag(id: impl Into<String>, reference: &str, pass: bool, detail: impl Into<String>) -> Self {
        Case { pass, detail: Some(detail.into()), ..Self::base(id, reference) }
    }

    /// `rel` or `error` depending on how the two sides came out.
    pub fn rel_or_error<E: Display>(
        id: impl Into<String>,
        reference: &str,
        expected: Result<f64, E>,
        got: Result<f64, E>,
        rel: f64,
    ) -> Self {
        match (expected, got) {
            (Ok(e), Ok(g)) => Self::rel(id, reference, e, g, rel),
            (Ok(e), Err(err)) => Self::error(id, reference, Some(e), err),
            (Err(err), _) => Self::error(id, reference, None, err),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Result of `verify` or `eval`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<Case>,
    /// Left empty unless timing was requested, so that reports of identical
    /// runs are byte-identical.
    pub elapsed_ms: Option<u64>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = ["suite", "seed", "id", "paper_ref", "expected", "got", "se", "tol", "pass", "detail", "elapsed_ms"];
        w.write_record(header).expect("in-memory write");
        let opt = |x: Option<f64>| x.map(fmt12).unwrap_or_default();
        let elapsed = self.elapsed_ms.map(|e| e.to_string()).unwrap_or_default();
        for c in &self.cases {
            w.write_record([
                self.suite.as_str(),
                &self.seed.to_string(),
                &c.id,
                &c.paper_ref,
                &opt(c.expected),
                &opt(c.got),
                &opt(c.se),
                &opt(c.tol),
                if c.pass { "true" } else { "false" },
                c.detail.as_deref().unwrap_or(""),
                &elapsed,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => fmt12(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(sig12(*x)),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// Output of `table`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect::<Map<_, _>>()))
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("table serializes");
        s.push('\n');
        s
    }
}
