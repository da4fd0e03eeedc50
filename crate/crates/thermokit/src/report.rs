//! Flat tables and the output directory they are written to.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(Option<f64>),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn num(x: f64) -> Cell {
        Cell::Num(Some(x))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => crate::fmt::opt(*x),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Num(Some(x)) if x.is_finite() => Value::from(*x),
            Cell::Num(_) => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.into())
    }
}

/// Header plus rows. CSV floats use 6 significant digits; JSON keeps full
/// precision.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Table {
        Table { headers: headers.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        w.flush().map_err(|e| Error::Data(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self.headers.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// A stage's output directory; remembers the row count of every file
/// written for the run manifest.
#[derive(Debug)]
pub struct OutDir {
    pub dir: PathBuf,
    pub rows: BTreeMap<String, usize>,
}

impl OutDir {
    pub fn create(dir: PathBuf) -> Result<OutDir> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(OutDir { dir, rows: BTreeMap::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn open(&self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        File::create(&p).map(BufWriter::new).map_err(|e| Error::io(&p, e))
    }

    /// Writes `name.csv` and `name.json`.
    pub fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        table.write_csv(self.open(&format!("{name}.csv"))?)?;
        self.rows.insert(format!("{name}.csv"), table.rows.len());
        self.json_value(&format!("{name}.json"), &table.to_json())
    }

    pub fn csv_only(&mut self, name: &str, table: &Table) -> Result<()> {
        table.write_csv(self.open(name)?)?;
        self.rows.insert(name.into(), table.rows.len());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Data(e.to_string()))?;
        self.json_value(name, &v)
    }

    fn json_value(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, v).map_err(|e| Error::Data(e.to_string()))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(&self.path(name), e))?;
        let n = match v {
            Value::Array(a) => a.len(),
            _ => 1,
        };
        self.rows.insert(name.into(), n);
        Ok(())
    }

    /// Records a file written by other means.
    pub fn note(&mut self, name: &str, rows: usize) {
        self.rows.insert(name.into(), rows);
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(|s| Cell::Text(s.to_string())).collect());
    }
    Ok(Table { headers, rows })
}

/// Mean, median, std, min and max cells; empty when there is no sample.
pub fn summary_cells(s: Option<&thermokit_core::stats::Summary>) -> Vec<Cell> {
    match s {
        Some(s) => vec![Cell::num(s.mean), Cell::num(s.median), Cell::num(s.std), Cell::num(s.min), Cell::num(s.max)],
        None => vec![Cell::Num(None); 5],
    }
}
