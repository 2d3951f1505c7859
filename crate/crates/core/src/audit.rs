//! Post-hoc checks on a computed lattice: the individual-sensitivity audit
//! and the permutation error bound on `|f(D) − g(D)|`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::database::{CanonicalValue, Database, IndividualId, Record, SensitivityBounds};
use crate::error::{Error, Result};
use crate::memo::{MemoTable, Subset};
use crate::oracle::{checked_eval, FunctionOracle, OutputSpace};

/// Default tolerance for sensitivity audits.
pub const AUDIT_TOL: f64 = 1e-9;

/// Largest database the exact permutation bound handles by default.
pub const DEFAULT_EXACT_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subset: Subset,
    pub individual: IndividualId,
    /// `|g(D′) − g(D′ − x_i)| − Δ_i`.
    pub excess: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    /// Number of `(D′, i)` pairs examined.
    pub checked: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `dist(g(D′), g(D′ − x_i)) ≤ Δ_i + tol` for every stored `D′` and
/// every member `i`. Pairs whose smaller side is absent are skipped.
pub fn sensitivity_audit<V, G: OutputSpace + Default>(
    memo: &MemoTable<V, G>,
    bounds: &SensitivityBounds,
    tol: f64,
) -> AuditReport {
    let mut report = AuditReport::default();
    for (s, g) in memo.entries() {
        for i in s.members() {
            let Some(smaller) = memo.get(s.without(i)) else {
                continue;
            };
            report.checked += 1;
            let id = &memo.records()[i].id;
            let excess = g.distance(&smaller) - bounds.get(id);
            if excess > tol {
                report.violations.push(Violation {
                    subset: s,
                    individual: id.clone(),
                    excess,
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Maximum over all `n!` orderings.
    Exact,
    /// Best of `samples` random orderings. Only a lower estimate of the
    /// bound; never a valid upper bound on the error.
    SampledLowerEstimate { samples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationBound {
    pub value: f64,
    /// Insertion order attaining `value`, as positions in the input database.
    pub witness: Vec<usize>,
    pub kind: BoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundOptions {
    pub exact_limit: usize,
    /// `(samples, seed)` for databases above `exact_limit`.
    pub sampling: Option<(usize, u64)>,
}

impl Default for ErrorBoundOptions {
    fn default() -> Self {
        ErrorBoundOptions {
            exact_limit: DEFAULT_EXACT_LIMIT,
            sampling: None,
        }
    }
}

/// `max_σ Σ_i max{dist(f(D_σ(<i) + x_σ(i)), f(D_σ(<i))) − Δ_σ(i), 0}`.
pub fn error_bound<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<PermutationBound>
where
    V: CanonicalValue,
    F: FunctionOracle<V>,
{
    error_bound_with(f, bounds, db, ErrorBoundOptions::default())
}

pub fn error_bound_with<V, F>(
    f: &F,
    bounds: &SensitivityBounds,
    db: &Database<V>,
    options: ErrorBoundOptions,
) -> Result<PermutationBound>
where
    V: CanonicalValue,
    F: FunctionOracle<V>,
{
    let n = db.len();
    if n <= options.exact_limit {
        exact_bound(f, bounds, db)
    } else if let Some((samples, seed)) = options.sampling {
        sampled_bound(f, bounds, db, samples, seed)
    } else {
        Err(Error::SizeLimit {
            n,
            limit: options.exact_limit,
        })
    }
}

// The maximum over orderings is a longest path from ∅ to D in the subset
// lattice, so it is found by a DP over subsets instead of listing n! orders.
fn exact_bound<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<PermutationBound>
where
    F: FunctionOracle<V>,
{
    let records = db.records();
    let n = records.len();
    if n >= 32 {
        return Err(Error::SizeLimit { n, limit: 31 });
    }
    let deltas: Vec<f64> = records.iter().map(|r| bounds.get(&r.id)).collect();
    let size = 1usize << n;

    let mut fvals = Vec::with_capacity(size);
    fvals.push(f.empty_value());
    let mut buf: Vec<&Record<V>> = Vec::with_capacity(n);
    for bits in 1..size as u64 {
        buf.clear();
        buf.extend(Subset::from_bits(bits).members().map(|i| &records[i]));
        fvals.push(checked_eval(f, &buf)?);
    }

    let mut best = vec![0.0f64; size];
    let mut last = vec![usize::MAX; size];
    for bits in 1..size {
        let s = Subset::from_bits(bits as u64);
        let mut top = f64::NEG_INFINITY;
        for i in s.members() {
            let prev = s.without(i).bits() as usize;
            let step = (fvals[bits].distance(&fvals[prev]) - deltas[i]).max(0.0);
            let cand = best[prev] + step;
            if cand > top {
                top = cand;
                last[bits] = i;
            }
        }
        best[bits] = top;
    }

    let mut witness = Vec::with_capacity(n);
    let mut cur = size - 1;
    while cur != 0 {
        let i = last[cur];
        witness.push(i);
        cur &= !(1 << i);
    }
    witness.reverse();
    Ok(PermutationBound {
        value: best[size - 1],
        witness,
        kind: BoundKind::Exact,
    })
}

fn sampled_bound<V, F>(
    f: &F,
    bounds: &SensitivityBounds,
    db: &Database<V>,
    samples: usize,
    seed: u64,
) -> Result<PermutationBound>
where
    F: FunctionOracle<V>,
{
    if samples == 0 {
        return Err(Error::invalid("sampled error bound needs at least one sample"));
    }
    let records = db.records();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut best = PermutationBound {
        value: f64::NEG_INFINITY,
        witness: Vec::new(),
        kind: BoundKind::SampledLowerEstimate { samples },
    };
    let mut prefix: Vec<&Record<V>> = Vec::with_capacity(records.len());
    for _ in 0..samples {
        order.shuffle(&mut rng);
        prefix.clear();
        let mut prev = f.empty_value();
        let mut total = 0.0;
        for &i in &order {
            prefix.push(&records[i]);
            let cur = checked_eval(f, &prefix)?;
            total += (cur.distance(&prev) - bounds.get(&records[i].id)).max(0.0);
            prev = cur;
        }
        if total > best.value {
            best.value = total;
            best.witness = order.clone();
        }
    }
    Ok(best)
}
