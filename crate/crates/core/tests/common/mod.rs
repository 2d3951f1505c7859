#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use spf_core::{Database, FnOracle, FunctionOracle, IndividualId, Point2, Record, SensitivityBounds};

/// Records with values `0..n`, so canonical position `i` holds value `i`.
pub fn indexed_db(n: usize) -> Database {
    Database::from_values(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
}

fn mask(records: &[&Record]) -> usize {
    records.iter().fold(0, |m, r| m | 1 << r.value as usize)
}

/// Arbitrary `f` given as a table over bitmasks of [`indexed_db`].
pub fn lattice_oracle(table: Vec<f64>) -> impl FunctionOracle<f64, Output = f64> {
    FnOracle::new(table[0], move |rs: &[&Record]| table[mask(rs)])
}

pub fn lattice_oracle_2d(table: Vec<Point2>) -> impl FunctionOracle<f64, Output = Point2> {
    FnOracle::new(table[0], move |rs: &[&Record]| table[mask(rs)])
}

pub fn per_index_bounds(deltas: &[f64]) -> SensitivityBounds {
    let map: HashMap<IndividualId, f64> = deltas.iter().enumerate().map(|(i, &d)| (i.into(), d)).collect();
    SensitivityBounds::new(map, 0.0).unwrap()
}

pub fn random_table<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..1usize << n).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn random_deltas<R: Rng>(rng: &mut R, n: usize, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..=hi)).collect()
}
