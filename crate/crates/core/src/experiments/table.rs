//! Result tables: fixed columns, typed cells, provenance and assertions.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// sha256 of the resolved config's canonical JSON.
    pub config_sha256: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        let value = serde_json::to_value(cfg).expect("config serializes");
        // serde_json maps are sorted, so this text is canonical.
        let canonical = value.to_string();
        let digest = Sha256::digest(canonical.as_bytes());
        Self {
            tool: "flagq".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: hex::encode(digest),
            seed: cfg.seed,
            config: value,
        }
    }
}

/// A named pass/fail statement about the whole table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
    pub assertions: Vec<Assertion>,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: &[&str], cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: Provenance::of(cfg),
            assertions: Vec::new(),
        }
    }

    /// Appends a row; width and finiteness are checked.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Shape {
                expected: format!("{} cells ({})", self.columns.len(), self.columns.join(",")),
                got: format!("{} cells", row.len()),
            });
        }
        if let Some(i) = row
            .iter()
            .position(|c| matches!(c, Cell::Float(v) if !v.is_finite()))
        {
            return Err(Error::NonFinite(format!(
                "{} column {}",
                self.experiment, self.columns[i]
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn assert(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }

    /// CSV with a `#` provenance header and trailing `#` assertion lines.
    pub fn to_csv(&self) -> Result<String> {
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!("# {} {} {}\n", p.tool, p.version, self.experiment));
        out.push_str(&format!("# config_sha256: {}\n", p.config_sha256));
        out.push_str(&format!("# seed: {}\n", p.seed));
        out.push_str(&format!("# config: {}\n", p.config));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(io_err)?;
        }
        let body = w.into_inner().map_err(|e| Error::Resource(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        for a in &self.assertions {
            out.push_str(&format!(
                "# assert {} {}: {}\n",
                a.name,
                if a.pass { "PASS" } else { "FAIL" },
                a.detail
            ));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Resource(e.to_string())
}
