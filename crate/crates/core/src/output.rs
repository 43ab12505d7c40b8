//! Plot-ready CSV tables with a provenance header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{domain, Result};

/// Column name plus unit ("" for dimensionless).
pub type Column = (String, String);

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // shortest representation that round-trips
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(t) => t.clone(),
        }
    }
}

/// An in-memory table written as
/// `# scenario_hash: ...`, `# units: ...`, optional `# note` lines, header, rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        let columns = columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect();
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn column(mut self, name: impl Into<String>, unit: impl Into<String>) -> Self {
        self.columns.push((name.into(), unit.into()));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(domain(format!("row has {} cells, table has {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Numeric values of a column; `None` if the column is missing or holds text.
    pub fn numbers(&self, column: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.0 == column)?;
        self.rows
            .iter()
            .map(|r| match r[i] {
                Cell::Num(v) => Some(v),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, out: W, scenario_hash: &str) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "# scenario_hash: {scenario_hash}")?;
        let units: Vec<String> =
            self.columns.iter().map(|(n, u)| format!("{n}={}", if u.is_empty() { "1" } else { u })).collect();
        writeln!(out, "# units: {}", units.join(", "))?;
        for n in &self.notes {
            writeln!(out, "# note: {n}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.0.as_str()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, dir: &Path, name: &str, scenario_hash: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        self.write_to(File::create(&path)?, scenario_hash)?;
        Ok(path)
    }
}

/// Lock-in spectrum columns (freq_Hz, X, Y) read from CSV; `#` lines are skipped.
pub fn read_spectrum(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
            .ok_or_else(|| domain(format!("missing column {}", names[0])))
    };
    let (fi, xi, yi) = (col(&["freq_Hz", "f_Hz", "freq"])?, col(&["X"])?, col(&["Y"])?);
    let (mut f, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let get = |k: usize| {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| crate::Error::Parse { line: i + 2, message: format!("bad number in column {k}") })
        };
        f.push(get(fi)?);
        x.push(get(xi)?);
        y.push(get(yi)?);
    }
    Ok((f, x, y))
}
