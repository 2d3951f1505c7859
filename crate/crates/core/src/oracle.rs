//! Query access to the function being preprocessed.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::database::{IndividualId, Record};
use crate::geo2d::Point2;

#[derive(Debug, Clone, Error)]
#[error("oracle evaluation failed: {0}")]
pub struct OracleError(pub String);

/// Output spaces the recursion works in: the reals under `|·|` and the plane
/// under the ℓ1 norm.
pub trait OutputSpace: Copy + std::fmt::Debug {
    fn distance(&self, other: &Self) -> f64;
    fn is_finite(&self) -> bool;
}

impl OutputSpace for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OutputSpace for Point2 {
    fn distance(&self, other: &Self) -> f64 {
        self.l1_distance(other)
    }

    fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

/// A deterministic function of a database, with an explicit value at `∅`.
///
/// `evaluate` is only called on nonempty subsets; the empty database always
/// maps to [`FunctionOracle::empty_value`]. Records arrive in canonical
/// `(value, id)` order.
pub trait FunctionOracle<V> {
    type Output: OutputSpace;

    fn empty_value(&self) -> Self::Output;

    fn evaluate(&self, records: &[&Record<V>]) -> Result<Self::Output, OracleError>;
}

impl<V, T: FunctionOracle<V> + ?Sized> FunctionOracle<V> for &T {
    type Output = T::Output;

    fn empty_value(&self) -> Self::Output {
        (**self).empty_value()
    }

    fn evaluate(&self, records: &[&Record<V>]) -> Result<Self::Output, OracleError> {
        (**self).evaluate(records)
    }
}

/// Oracle backed by a closure.
pub struct FnOracle<O, F> {
    empty: O,
    f: F,
}

impl<O, F> FnOracle<O, F> {
    pub fn new(empty: O, f: F) -> Self {
        FnOracle { empty, f }
    }
}

impl<V, O, F> FunctionOracle<V> for FnOracle<O, F>
where
    O: OutputSpace,
    F: Fn(&[&Record<V>]) -> O,
{
    type Output = O;

    fn empty_value(&self) -> O {
        self.empty
    }

    fn evaluate(&self, records: &[&Record<V>]) -> Result<O, OracleError> {
        Ok((self.f)(records))
    }
}

/// Oracle given by an explicit table from id sets to outputs.
#[derive(Debug, Clone)]
pub struct TableOracle<O> {
    empty: O,
    table: HashMap<BTreeSet<IndividualId>, O>,
}

impl<O: OutputSpace> TableOracle<O> {
    pub fn new(empty: O) -> Self {
        TableOracle {
            empty,
            table: HashMap::new(),
        }
    }

    pub fn set<I, S>(mut self, ids: I, value: O) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<IndividualId>,
    {
        self.insert(ids, value);
        self
    }

    pub fn insert<I, S>(&mut self, ids: I, value: O)
    where
        I: IntoIterator<Item = S>,
        S: Into<IndividualId>,
    {
        let key: BTreeSet<IndividualId> = ids.into_iter().map(Into::into).collect();
        self.table.insert(key, value);
    }
}

impl<V, O: OutputSpace> FunctionOracle<V> for TableOracle<O> {
    type Output = O;

    fn empty_value(&self) -> O {
        self.empty
    }

    fn evaluate(&self, records: &[&Record<V>]) -> Result<O, OracleError> {
        let key: BTreeSet<IndividualId> = records.iter().map(|r| r.id.clone()).collect();
        self.table.get(&key).copied().ok_or_else(|| {
            let ids: Vec<_> = key.iter().map(|id| id.as_str()).collect();
            OracleError(format!("no table entry for {{{}}}", ids.join(",")))
        })
    }
}

pub(crate) fn checked_eval<V, F: FunctionOracle<V>>(f: &F, records: &[&Record<V>]) -> Result<F::Output, OracleError> {
    let out = f.evaluate(records)?;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(OracleError(format!("non-finite output {out:?}")))
    }
}
