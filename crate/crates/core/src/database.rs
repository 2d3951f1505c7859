//! Records, databases and per-individual sensitivity parameters.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::geo2d::Point2;

/// Opaque identifier of one individual.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndividualId(String);

impl IndividualId {
    pub fn new(id: impl Into<String>) -> Self {
        IndividualId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndividualId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for IndividualId {
    fn from(s: &str) -> Self {
        IndividualId(s.to_owned())
    }
}

impl From<String> for IndividualId {
    fn from(s: String) -> Self {
        IndividualId(s)
    }
}

impl From<usize> for IndividualId {
    fn from(i: usize) -> Self {
        IndividualId(i.to_string())
    }
}

/// Values that can be put in a total order for canonical subset keying.
pub trait CanonicalValue: Clone {
    fn canonical_cmp(&self, other: &Self) -> Ordering;
}

impl CanonicalValue for f64 {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl CanonicalValue for Point2 {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.x1.total_cmp(&other.x1).then_with(|| self.x2.total_cmp(&other.x2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record<V = f64> {
    pub id: IndividualId,
    pub value: V,
}

impl<V> Record<V> {
    pub fn new(id: impl Into<IndividualId>, value: V) -> Self {
        Record { id: id.into(), value }
    }
}

/// An ordered collection of records with unique individual ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Database<V = f64> {
    records: Vec<Record<V>>,
}

impl<V> Database<V> {
    pub fn new(records: Vec<Record<V>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(&r.id) {
                return Err(Error::DuplicateId(r.id.to_string()));
            }
        }
        Ok(Database { records })
    }

    pub fn empty() -> Self {
        Database { records: Vec::new() }
    }

    pub fn records(&self) -> &[Record<V>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &IndividualId> {
        self.records.iter().map(|r| &r.id)
    }
}

impl Database<f64> {
    /// Builds a database whose ids are the positions `0..n` of `values`.
    pub fn from_values(values: &[f64]) -> Self {
        Database {
            records: values.iter().enumerate().map(|(i, &v)| Record::new(i, v)).collect(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }
}

impl<V: CanonicalValue> Database<V> {
    /// Records sorted by `(value, id)`; the order used for subset bitmasks.
    pub fn canonical_records(&self) -> Vec<Record<V>> {
        let mut sorted = self.records.clone();
        sorted.sort_by(|a, b| a.value.canonical_cmp(&b.value).then_with(|| a.id.cmp(&b.id)));
        sorted
    }
}

/// Per-individual sensitivity bounds `Δ_i` with a default for absent ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityBounds {
    per_individual: HashMap<IndividualId, f64>,
    default: f64,
}

impl SensitivityBounds {
    pub fn uniform(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(SensitivityBounds {
            per_individual: HashMap::new(),
            default: delta,
        })
    }

    pub fn new(per_individual: HashMap<IndividualId, f64>, default: f64) -> Result<Self> {
        check_delta(default)?;
        for &d in per_individual.values() {
            check_delta(d)?;
        }
        Ok(SensitivityBounds {
            per_individual,
            default,
        })
    }

    pub fn with(mut self, id: impl Into<IndividualId>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        self.per_individual.insert(id.into(), delta);
        Ok(self)
    }

    pub fn get(&self, id: &IndividualId) -> f64 {
        self.per_individual.get(id).copied().unwrap_or(self.default)
    }

    pub fn default_delta(&self) -> f64 {
        self.default
    }

    pub fn per_individual(&self) -> &HashMap<IndividualId, f64> {
        &self.per_individual
    }

    /// True when every individual shares the default bound.
    pub fn is_uniform(&self) -> bool {
        self.per_individual.values().all(|&d| d == self.default)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "sensitivity bound must be finite and non-negative, got {delta}"
        )))
    }
}
