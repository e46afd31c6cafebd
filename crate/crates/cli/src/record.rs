//! Machine-readable output records.
//!
//! Both formats are rendered by hand so the bytes are a pure function of the
//! data: CSV with '.' decimals and minimal quoting, JSON as an array of flat
//! objects. Floats are printed in scientific notation with 17 significant
//! digits, which round-trips f64 exactly. Every record carries the
//! experiment name, the seed, and the artifact version.

use levylab_core::concentration::ConcentrationReport;
use levylab_core::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Int(v) => v.to_string(),
            Value::Float(v) => float_repr(*v),
            Value::Text(s) => csv_escape(s),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Int(v) => v.to_string(),
            // JSON has no lexeme for non-finite numbers.
            Value::Float(v) if !v.is_finite() => "null".into(),
            Value::Float(v) => float_repr(*v),
            Value::Text(s) => json_escape(s),
            Value::Bool(b) => b.to_string(),
        }
    }
}

/// 17 significant digits in scientific notation; parses back to the same
/// bits. Non-finite values print as inf / -inf / NaN (CSV only).
fn float_repr(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A homogeneous table of records for one experiment. The experiment name,
/// seed, and version are materialized as the three leading columns of every
/// row.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSet {
    pub experiment: String,
    pub seed: u64,
    fields: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl RecordSet {
    pub fn new(experiment: impl Into<String>, seed: u64, fields: Vec<&'static str>) -> Self {
        Self { experiment: experiment.into(), seed, fields, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.fields.len(),
            "row width does not match the declared schema"
        );
        self.rows.push(row);
    }

    /// Append a column to the schema and a value to every existing row.
    pub fn append_column(&mut self, field: &'static str, values: Vec<Value>) {
        assert_eq!(values.len(), self.rows.len());
        self.fields.push(field);
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn provenance(&self) -> [(&'static str, Value); 3] {
        [
            ("experiment", Value::Text(self.experiment.clone())),
            ("seed", Value::UInt(self.seed)),
            ("version", Value::Text(VERSION.into())),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let lead = self.provenance();
        let header: Vec<&str> =
            lead.iter().map(|(k, _)| *k).chain(self.fields.iter().copied()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = lead
                .iter()
                .map(|(_, v)| v.csv())
                .chain(row.iter().map(Value::csv))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let lead = self.provenance();
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            let mut first = true;
            for (k, v) in lead.iter().map(|(k, v)| (*k, v)).chain(self.fields.iter().copied().zip(row)) {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{}:{}", json_escape(k), v.json());
            }
            out.push('}');
        }
        out.push_str("]\n");
        out
    }
}

/// Write bytes to a path atomically: a sibling temporary file is filled,
/// flushed, then renamed over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Dump a concentration report as plot-ready CSV: one (n, epsilon, exact,
/// mc, halfwidth) row per entry; the exact column is empty when no closed
/// form is attached. Rejects empty reports.
pub fn emit_plot_data(report: &ConcentrationReport, path: &Path) -> Result<()> {
    if report.entries.is_empty() {
        return Err(Error::InsufficientData(format!(
            "report for {} has no entries to plot",
            report.family_label
        )));
    }
    let mut out = String::from("n,epsilon,exact,mc,halfwidth\n");
    for e in &report.entries {
        let exact = e.exact_mass.map(float_repr).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.n,
            float_repr(e.epsilon),
            exact,
            float_repr(e.mc_mass),
            float_repr(e.mc_halfwidth)
        );
    }
    write_atomic(path, out.as_bytes())
}

/// Rows of a plot-data file, parsed back. Inverse of [`emit_plot_data`] up
/// to the fields it writes.
pub type PlotRow = (u64, f64, Option<f64>, f64, f64);

pub fn parse_plot_data(path: &Path) -> Result<Vec<PlotRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("n,epsilon,exact,mc,halfwidth") => {}
        other => {
            return Err(Error::MalformedDump(format!(
                "unexpected plot header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::MalformedDump(format!(
                "plot row {} has {} fields",
                idx + 2,
                cells.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::MalformedDump(format!("bad number {s:?} in plot row {}", idx + 2)))
        };
        let n = cells[0]
            .parse::<u64>()
            .map_err(|_| Error::MalformedDump(format!("bad index {:?} in plot row {}", cells[0], idx + 2)))?;
        let exact = if cells[2].is_empty() { None } else { Some(parse(cells[2])?) };
        rows.push((n, parse(cells[1])?, exact, parse(cells[3])?, parse(cells[4])?));
    }
    Ok(rows)
}
