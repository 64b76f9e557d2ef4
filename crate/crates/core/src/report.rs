//! Deterministic JSON reports and CSV tables.
//!
//! Floats are written as `{:.16e}` (17 significant digits) everywhere, so the
//! same computation always produces the same bytes.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::problem::SCHEMA;

pub const TOOL: &str = "nilforms";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty-printing formatter with fixed float formatting.
struct FixedFloat(serde_json::ser::PrettyFormatter<'static>);

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(Default::default()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::input(format!("report serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// One pass/fail decision with the numbers behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub value: Value,
    pub tol: Option<f64>,
}

impl Verdict {
    /// Passes when `value < tol`.
    pub fn below(check: &str, value: f64, tol: f64) -> Self {
        Verdict { check: check.into(), passed: value < tol, value: value.into(), tol: Some(tol) }
    }

    pub fn holds(check: &str, passed: bool, value: impl Into<Value>) -> Self {
        Verdict { check: check.into(), passed, value: value.into(), tol: None }
    }

    pub fn expect<T: PartialEq + Serialize>(check: &str, actual: &T, expected: &T) -> Self {
        Verdict {
            check: check.into(),
            passed: actual == expected,
            value: serde_json::json!({
                "actual": serde_json::to_value(actual).unwrap_or(Value::Null),
                "expected": serde_json::to_value(expected).unwrap_or(Value::Null),
            }),
            tol: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: Value,
    /// Command-line overrides in effect.
    pub options: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, input: Value, results: Value, verdicts: Vec<Verdict>) -> Self {
        let passed = verdicts.iter().all(|v| v.passed);
        Report {
            schema: SCHEMA,
            tool: TOOL,
            version: VERSION,
            command,
            input,
            options: Value::Null,
            results,
            verdicts,
            passed,
        }
    }
}

/// A named table destined for `<dir>/<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A table cell.
pub enum Cell {
    F(f64),
    U(usize),
    S(String),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::U(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::S(String::new()), Cell::F)
    }
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row.iter().map(Cell::render).collect());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", self.name)))
            .map_err(|e| Error::Io(io::Error::other(e)))?;
        w.write_record(&self.header).map_err(|e| Error::Io(io::Error::other(e)))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| Error::Io(io::Error::other(e)))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "y": -2.0, "z": f64::NAN})).unwrap();
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"y\": -2.0000000000000000e0"));
        assert!(s.contains("\"z\": null"));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn verdict_shapes() {
        assert!(Verdict::below("r", 1e-13, 1e-12).passed);
        assert!(!Verdict::below("r", f64::NAN, 1e-12).passed);
        assert!(!Verdict::expect("betti", &vec![1, 2], &vec![1, 3]).passed);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![Cell::U(3), Cell::F(0.5)]);
        t.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "a,b\n3,5.0000000000000000e-1\n");
    }
}
