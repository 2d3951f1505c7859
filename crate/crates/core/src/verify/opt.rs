use crate::database::{CanonicalValue, Database, Record, SensitivityBounds};
use crate::error::{Error, Result};
use crate::memo::{MemoTable, Subset};
use crate::oracle::{checked_eval, FunctionOracle};

pub const OPT_MAX_N: usize = 12;

const SEARCH_ITERATIONS: usize = 64;

/// `f` on every subset of an `n`-record root (indexed by bitmask, `∅`
/// included) together with `Δ` per record position.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeValues {
    values: Vec<f64>,
    deltas: Vec<f64>,
}

impl LatticeValues {
    pub fn new(values: Vec<f64>, deltas: Vec<f64>) -> Result<Self> {
        let n = deltas.len();
        if n > OPT_MAX_N {
            return Err(Error::SizeLimit { n, limit: OPT_MAX_N });
        }
        if values.len() != 1 << n {
            return Err(Error::invalid(format!(
                "{} lattice values for {n} records, expected {}",
                values.len(),
                1usize << n
            )));
        }
        if values.iter().chain(&deltas).any(|v| !v.is_finite()) || deltas.iter().any(|&d| d < 0.0) {
            return Err(Error::invalid("lattice values must be finite and deltas ≥ 0"));
        }
        Ok(LatticeValues { values, deltas })
    }

    /// Evaluates `f` over the subsets of `db`, indexed like the memo of
    /// [`crate::preprocess`].
    pub fn from_oracle<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<Self>
    where
        V: CanonicalValue,
        F: FunctionOracle<V, Output = f64>,
    {
        let n = db.len();
        if n > OPT_MAX_N {
            return Err(Error::SizeLimit { n, limit: OPT_MAX_N });
        }
        let records = db.canonical_records();
        let mut values = Vec::with_capacity(1 << n);
        values.push(f.empty_value());
        let mut buf: Vec<&Record<V>> = Vec::with_capacity(n);
        for bits in 1..1u64 << n {
            buf.clear();
            buf.extend(Subset::from_bits(bits).members().map(|i| &records[i]));
            values.push(checked_eval(f, &buf)?);
        }
        let deltas = records.iter().map(|r| bounds.get(&r.id)).collect();
        Self::new(values, deltas)
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn value(&self, s: Subset) -> f64 {
        self.values[s.bits() as usize]
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// The sub-lattice below `s`, with `s`'s members renumbered in order.
    pub fn restrict(&self, s: Subset) -> LatticeValues {
        let members: Vec<usize> = s.members().collect();
        let values = (0..1u64 << members.len())
            .map(|local| {
                let global = Subset::from_indices(
                    members
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| local >> j & 1 == 1)
                        .map(|(_, &i)| i),
                );
                self.value(global)
            })
            .collect();
        let deltas = members.iter().map(|&i| self.deltas[i]).collect();
        LatticeValues { values, deltas }
    }

    /// `max_S |f(S) − g(S)|` against a memo over the same lattice.
    pub fn max_error<V>(&self, g: &MemoTable<V, f64>) -> Result<f64> {
        let mut worst = 0.0f64;
        for bits in 0..self.values.len() as u64 {
            let s = Subset::from_bits(bits);
            worst = worst.max((self.value(s) - g.require(s)?).abs());
        }
        Ok(worst)
    }

    // Difference constraints `g(S) − g(S − i) ≤ Δ_i` both ways, and the box
    // `f(S) − t ≤ g(S) ≤ f(S) + t` against a virtual zero node. Feasible iff
    // the constraint graph has no negative cycle.
    fn feasible(&self, t: f64) -> bool {
        let size = self.values.len();
        let zero = size;
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(v.abs())).max(t);
        let eps = 1e-12 * scale;

        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(size * (2 * self.len() + 2));
        for (s, &f) in self.values.iter().enumerate() {
            edges.push((zero, s, f + t));
            edges.push((s, zero, t - f));
            for i in Subset::from_bits(s as u64).members() {
                let p = s & !(1 << i);
                edges.push((p, s, self.deltas[i]));
                edges.push((s, p, self.deltas[i]));
            }
        }

        let mut dist = vec![0.0f64; size + 1];
        for _ in 0..=size {
            let mut changed = false;
            for &(u, v, w) in &edges {
                let cand = dist[u] + w;
                if cand < dist[v] - eps {
                    dist[v] = cand;
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
        false
    }
}

/// The smallest `t` such that some `g` with individual sensitivities
/// `≤ Δ_i` is within `t` of `f` on every subset, to within `1e−9`.
///
/// Binary search over `[0, max f − min f]`; each probe solves the
/// difference-constraint system with Bellman–Ford.
pub fn opt_linf(lattice: &LatticeValues) -> f64 {
    if lattice.feasible(0.0) {
        return 0.0;
    }
    let (lo_f, hi_f) = lattice
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut lo, mut hi) = (0.0, hi_f - lo_f);
    for _ in 0..SEARCH_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if lattice.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
