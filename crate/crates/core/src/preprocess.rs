//! The general subset-lattice recursion.
//!
//! `g(∅)` is the oracle's empty value. For a nonempty `D`, every strictly
//! smaller neighbour `D − x_i` pins `g(D)` to `[g(D − x_i) − Δ_i, g(D − x_i) + Δ_i]`;
//! `g(D)` is the point of the intersection of those windows closest to `f(D)`.
//! Subsets are visited in increasing bitmask order, which puts every
//! `D − x_i` before `D`.

use crate::database::{CanonicalValue, Database, Record, SensitivityBounds};
use crate::error::{Error, Result};
use crate::memo::{MemoTable, Subset};
use crate::oracle::{checked_eval, FunctionOracle, OutputSpace};

/// Default cap on the number of records the exponential recursion accepts.
pub const DEFAULT_MAX_N: usize = 24;

/// Relative slack allowed when checking `lower ≤ upper`.
pub const FEASIBILITY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessOptions {
    pub max_n: usize,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions { max_n: DEFAULT_MAX_N }
    }
}

/// Output of a lattice recursion: `g` at the root plus the full memo.
#[derive(Debug, Clone)]
pub struct Preprocessed<V, G> {
    pub value: G,
    pub memo: MemoTable<V, G>,
}

/// The window `[Lower(D), Upper(D)]` that `g(D)` must fall in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    lower: f64,
    upper: f64,
}

impl FeasibleInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let scale = lower.abs().max(upper.abs()).max(1.0);
        if lower - upper > FEASIBILITY_RTOL * scale || lower.is_nan() || upper.is_nan() {
            return Err(Error::InvariantViolation(format!(
                "empty feasible interval [{lower}, {upper}]"
            )));
        }
        Ok(FeasibleInterval { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Point of the interval closest to `target`. A target equal to an
    /// endpoint is returned unchanged.
    pub fn clamp(&self, target: f64) -> f64 {
        if self.upper <= target {
            self.upper
        } else if self.lower >= target {
            self.lower
        } else {
            target
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// `[max_i g(D − x_i) − Δ_i, min_i g(D − x_i) + Δ_i]` for a nonempty `subset`
/// of the memo's root.
pub fn feasible_interval<V>(
    subset: Subset,
    memo: &MemoTable<V, f64>,
    bounds: &SensitivityBounds,
) -> Result<FeasibleInterval> {
    if subset.is_empty() {
        return Err(Error::invalid("feasible interval of the empty database"));
    }
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for i in subset.members() {
        let g = memo.require(subset.without(i))?;
        let delta = bounds.get(&memo.records()[i].id);
        lower = lower.max(g - delta);
        upper = upper.min(g + delta);
    }
    FeasibleInterval::new(lower, upper)
}

/// Computes `g` on every subset of `db` and returns it at `db`.
pub fn preprocess<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<Preprocessed<V, f64>>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = f64>,
{
    preprocess_with(f, bounds, db, PreprocessOptions::default())
}

pub fn preprocess_with<V, F>(
    f: &F,
    bounds: &SensitivityBounds,
    db: &Database<V>,
    options: PreprocessOptions,
) -> Result<Preprocessed<V, f64>>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = f64>,
{
    build_lattice(f, bounds, db, options, |subset, target, memo, deltas| {
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for i in subset.members() {
            let g = memo.require(subset.without(i))?;
            lower = lower.max(g - deltas[i]);
            upper = upper.min(g + deltas[i]);
        }
        Ok(FeasibleInterval::new(lower, upper)?.clamp(target))
    })
}

/// Shared bottom-up driver. `step` receives the subset, `f` on it, the memo
/// filled for all smaller subsets, and `Δ` per canonical index.
pub(crate) fn build_lattice<V, F, S>(
    f: &F,
    bounds: &SensitivityBounds,
    db: &Database<V>,
    options: PreprocessOptions,
    mut step: S,
) -> Result<Preprocessed<V, F::Output>>
where
    V: CanonicalValue,
    F: FunctionOracle<V>,
    F::Output: Default,
    S: FnMut(Subset, F::Output, &MemoTable<V, F::Output>, &[f64]) -> Result<F::Output>,
{
    let n = db.len();
    if n > options.max_n {
        return Err(Error::SizeLimit {
            n,
            limit: options.max_n,
        });
    }
    let records = db.canonical_records();
    let deltas: Vec<f64> = records.iter().map(|r| bounds.get(&r.id)).collect();
    let mut memo = MemoTable::allocate(records.clone())?;

    let empty = f.empty_value();
    if !empty.is_finite() {
        return Err(Error::invalid(format!("non-finite empty value {empty:?}")));
    }
    memo.insert(Subset::EMPTY, empty);

    let mut buf: Vec<&Record<V>> = Vec::with_capacity(n);
    for bits in 1..(1u64 << n) {
        let subset = Subset::from_bits(bits);
        buf.clear();
        buf.extend(subset.members().map(|i| &records[i]));
        let target = checked_eval(f, &buf)?;
        let g = step(subset, target, &memo, &deltas)?;
        memo.insert(subset, g);
    }

    let value = memo.require(memo.root())?;
    Ok(Preprocessed { value, memo })
}
