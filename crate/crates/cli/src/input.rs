//! CSV ingestion for data, sensitivity and privacy-parameter files.
//!
//! Diagnostics carry 1-based line and column numbers of the offending cell.

use std::collections::HashMap;
use std::path::Path;

use spf_core::{IndividualId, Point2, Record};

use crate::CliError;

/// Records in file order, 1-D or 2-D depending on the header.
#[derive(Debug, Clone)]
pub enum Data {
    Scalar(Vec<Record<f64>>),
    Planar(Vec<Record<Point2>>),
}

impl Data {
    pub fn len(&self) -> usize {
        match self {
            Data::Scalar(r) => r.len(),
            Data::Planar(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<IndividualId> {
        match self {
            Data::Scalar(r) => r.iter().map(|r| r.id.clone()).collect(),
            Data::Planar(r) => r.iter().map(|r| r.id.clone()).collect(),
        }
    }
}

struct Table {
    path: String,
    header: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, CliError> {
        let shown = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| CliError::input(&shown, e.to_string()))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::input(&shown, e.to_string()))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let mut rows = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| CliError::input(&shown, e.to_string()))?;
            let line = row.position().map_or(0, |p| p.line());
            rows.push((line, row));
        }
        Ok(Table {
            path: shown,
            header,
            rows,
        })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize, CliError> {
        self.column(name).ok_or_else(|| {
            CliError::input(
                &self.path,
                format!(
                    "line 1, column {}: missing column `{name}` (header is `{}`)",
                    self.header.len() + 1,
                    self.header.join(",")
                ),
            )
        })
    }

    fn cell<'r>(&self, line: u64, row: &'r csv::StringRecord, col: usize, name: &str) -> Result<&'r str, CliError> {
        match row.get(col) {
            Some(s) if !s.is_empty() => Ok(s),
            _ => Err(CliError::input(
                &self.path,
                format!("line {line}, column {}: empty `{name}` cell", col + 1),
            )),
        }
    }

    fn number(&self, line: u64, row: &csv::StringRecord, col: usize, name: &str) -> Result<f64, CliError> {
        let s = self.cell(line, row, col, name)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CliError::input(
                &self.path,
                format!("line {line}, column {}: `{s}` is not a finite number", col + 1),
            )),
        }
    }
}

/// Reads `id,value` or `id,x1,x2` data.
pub fn read_data(path: &Path) -> Result<Data, CliError> {
    let t = Table::read(path)?;
    let id = t.require("id")?;
    if t.column("value").is_none() && t.column("x1").is_some() {
        let (c1, c2) = (t.require("x1")?, t.require("x2")?);
        let mut out = Vec::with_capacity(t.rows.len());
        for (line, row) in &t.rows {
            let p = Point2::new(t.number(*line, row, c1, "x1")?, t.number(*line, row, c2, "x2")?);
            out.push(Record::new(t.cell(*line, row, id, "id")?, p));
        }
        return Ok(Data::Planar(out));
    }
    let value = t.require("value")?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, row) in &t.rows {
        let v = t.number(*line, row, value, "value")?;
        out.push(Record::new(t.cell(*line, row, id, "id")?, v));
    }
    Ok(Data::Scalar(out))
}

/// Per-id numbers from an `id,<column>` file. A `*` id sets the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamTable {
    pub per_individual: HashMap<IndividualId, f64>,
    pub default: Option<f64>,
}

/// Reads an `id,<column>` parameter file. Range checks are left to the
/// caller; only syntax is checked here.
pub fn read_params(path: &Path, column: &str) -> Result<ParamTable, CliError> {
    let t = Table::read(path)?;
    let (id, col) = (t.require("id")?, t.require(column)?);
    let mut out = ParamTable::default();
    for (line, row) in &t.rows {
        let key = t.cell(*line, row, id, "id")?;
        let v = t.number(*line, row, col, column)?;
        let dup = if key == "*" {
            out.default.replace(v).is_some()
        } else {
            out.per_individual.insert(key.into(), v).is_some()
        };
        if dup {
            return Err(CliError::input(
                &t.path,
                format!("line {line}, column {}: id `{key}` listed twice", id + 1),
            ));
        }
    }
    Ok(out)
}
