//! Experiment reports: a TOML document plus a CSV table.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Sign relating structure twists to curve twists, fixed by the periodicity
/// calibration: twisting the structure by `s·k·ℓ(β)` equals twisting curves by `k`.
pub const TWIST_SIGN: i32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub metric: String,
    pub lower: f64,
    pub upper: f64,
    pub certificate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub curve: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildInfo {
    pub package: String,
    pub version: String,
    pub twist_sign: i32,
}

impl Default for BuildInfo {
    fn default() -> Self {
        BuildInfo {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            twist_sign: TWIST_SIGN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Parsed CSV sidecar, for recomputing verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(str::to_string).collect());
        }
        Ok(CsvTable { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(|s| s.parse().ok()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub anchor: String,
    pub pass: bool,
    pub wall_time_s: f64,
    pub table_rows: usize,
    pub table_columns: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub build: BuildInfo,
    pub bounds: Vec<Bound>,
    pub witnesses: Vec<Witness>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(experiment: &str, anchor: &str, inputs: BTreeMap<String, String>) -> Self {
        Report {
            experiment: experiment.to_string(),
            anchor: anchor.to_string(),
            pass: true,
            wall_time_s: 0.0,
            table_rows: 0,
            table_columns: Vec::new(),
            inputs,
            build: BuildInfo::default(),
            bounds: Vec::new(),
            witnesses: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            table: Table::default(),
        }
    }

    pub fn bound(&mut self, metric: &str, lower: f64, upper: f64, certificate: &str) {
        self.bounds.push(Bound { metric: metric.to_string(), lower, upper, certificate: certificate.to_string() });
    }

    pub fn witness(&mut self, curve: impl ToString, ratio: f64) {
        self.witnesses.push(Witness { curve: curve.to_string(), ratio });
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.to_string(), pass, detail: detail.into() });
    }

    pub fn note(&mut self, note: String) {
        self.notes.push(note);
    }

    pub fn set_table(&mut self, table: Table) {
        self.table_rows = table.rows.len();
        self.table_columns = table.columns.clone();
        self.table = table;
    }

    pub fn finish(&mut self) {
        self.pass = self.verdicts.iter().all(|v| v.pass);
    }

    pub fn verdict_named(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn write(&self, out: &Path, csv: &Path) -> Result<()> {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(out, self.to_toml()?)?;
        fs::write(csv, self.table.to_csv()?)?;
        Ok(())
    }
}
