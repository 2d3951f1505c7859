use std::collections::{BTreeSet, HashMap};

use crate::database::{CanonicalValue, Database, Record, SensitivityBounds};
use crate::error::{Error, Result};
use crate::memo::{MemoTable, Subset};
use crate::oracle::{FunctionOracle, OracleError};

pub const BRUTE_FORCE_MAX_N: usize = 12;

/// Top-down transcription of the recursive definition, memoized on sets of
/// record positions. Slow and independent of [`crate::preprocess`].
///
/// The returned table is keyed by the canonical record order, so it can be
/// compared entry-by-entry with the fast path.
pub fn brute_force_spf<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<MemoTable<V, f64>>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = f64>,
{
    let n = db.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let records = db.canonical_records();
    let mut solver = Solver {
        f,
        bounds,
        records: &records,
        memo: HashMap::new(),
    };
    let full: BTreeSet<usize> = (0..n).collect();
    solver.g(&full)?;

    let entries: Vec<(Subset, f64)> = solver
        .memo
        .iter()
        .map(|(set, &g)| (Subset::from_indices(set.iter().copied()), g))
        .collect();
    MemoTable::from_entries(records.clone(), entries)
}

struct Solver<'a, V, F> {
    f: &'a F,
    bounds: &'a SensitivityBounds,
    records: &'a [Record<V>],
    memo: HashMap<BTreeSet<usize>, f64>,
}

impl<V, F: FunctionOracle<V, Output = f64>> Solver<'_, V, F> {
    fn f_at(&self, set: &BTreeSet<usize>) -> Result<f64> {
        if set.is_empty() {
            return Ok(self.f.empty_value());
        }
        let rs: Vec<&Record<V>> = set.iter().map(|&i| &self.records[i]).collect();
        let v = self.f.evaluate(&rs)?;
        if !v.is_finite() {
            return Err(OracleError(format!("non-finite value {v}")).into());
        }
        Ok(v)
    }

    fn g(&mut self, set: &BTreeSet<usize>) -> Result<f64> {
        if let Some(&g) = self.memo.get(set) {
            return Ok(g);
        }
        let fd = self.f_at(set)?;
        let value = if set.is_empty() {
            fd
        } else {
            let mut upper = f64::INFINITY;
            let mut lower = f64::NEG_INFINITY;
            for &i in set {
                let mut smaller = set.clone();
                smaller.remove(&i);
                let gs = self.g(&smaller)?;
                let delta = self.bounds.get(&self.records[i].id);
                upper = upper.min(gs + delta);
                lower = lower.max(gs - delta);
            }
            if upper <= fd {
                upper
            } else if lower >= fd {
                lower
            } else {
                fd
            }
        };
        self.memo.insert(set.clone(), value);
        Ok(value)
    }
}

/// Subsets where `g ≠ f` but `g` equals neither `Upper` nor `Lower` exactly:
/// a correct recursion leaves this empty, because any departure from `f`
/// is forced by a binding neighbour constraint.
pub fn boundary_tightness_failures<V, F>(
    f: &F,
    bounds: &SensitivityBounds,
    memo: &MemoTable<V, f64>,
) -> Result<Vec<Subset>>
where
    F: FunctionOracle<V, Output = f64>,
{
    let mut failures = Vec::new();
    for (s, g) in memo.entries() {
        if s.is_empty() {
            continue;
        }
        let fd = f.evaluate(&memo.subset_records(s))?;
        if g == fd {
            continue;
        }
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        for i in s.members() {
            let gs = memo.require(s.without(i))?;
            let delta = bounds.get(&memo.records()[i].id);
            upper = upper.min(gs + delta);
            lower = lower.max(gs - delta);
        }
        if g != upper && g != lower {
            failures.push(s);
        }
    }
    Ok(failures)
}
