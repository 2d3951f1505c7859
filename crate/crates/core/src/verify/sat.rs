use std::fmt;
use std::sync::Arc;

use crate::database::{Database, Record};
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, OracleError};

pub const SAT_MAX_N: usize = 12;

type Evaluator = Arc<dyn Fn(&[bool]) -> bool + Send + Sync>;

/// A black-box Boolean formula over `n` variables. `assignment[j]` is the
/// truth value of `x_{j+1}`.
#[derive(Clone)]
pub struct BoolFormula {
    n: usize,
    eval: Evaluator,
}

impl BoolFormula {
    pub fn new(n: usize, eval: impl Fn(&[bool]) -> bool + Send + Sync + 'static) -> Self {
        BoolFormula {
            n,
            eval: Arc::new(eval),
        }
    }

    /// Bit `a` of `table` is the value at the assignment whose bit `j` is
    /// `x_{j+1}`. Needs `n ≤ 6`.
    pub fn from_truth_table(n: usize, table: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::SizeLimit { n, limit: 6 });
        }
        Ok(BoolFormula::new(n, move |x| {
            let a = x.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | (b as u32) << j);
            table >> a & 1 == 1
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        (self.eval)(assignment)
    }

    /// Exhaustive scan over all `2ⁿ` assignments.
    pub fn is_satisfiable(&self) -> bool {
        let mut x = vec![false; self.n];
        (0..1u64 << self.n).any(|a| {
            for (j, b) in x.iter_mut().enumerate() {
                *b = a >> j & 1 == 1;
            }
            self.eval(&x)
        })
    }
}

impl fmt::Debug for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoolFormula")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

/// `f(D) = |D| − φ(D + T)`, where a record in `D` sets its variable to
/// false and every other variable is true. Under `Δ = 1`, `g` at the
/// all-false database is below `n` iff `φ` is satisfiable.
#[derive(Debug, Clone)]
pub struct SatGadget {
    pub formula: BoolFormula,
    /// One record per variable: id `F{j}`, value `j`.
    pub database: Database<f64>,
    empty: f64,
}

/// The gadget with `f(∅) = −φ(Tⁿ)`, the same formula as everywhere else.
pub fn sat_gadget(formula: BoolFormula) -> Result<SatGadget> {
    let empty = -f64::from(u8::from(formula.eval(&vec![true; formula.n()])));
    build(formula, empty)
}

/// The gadget with `f(∅)` pinned to `0`. This loses formulas satisfied only
/// by the all-true assignment: their `g` at the all-false database is `n`.
pub fn sat_gadget_zero_empty(formula: BoolFormula) -> Result<SatGadget> {
    build(formula, 0.0)
}

fn build(formula: BoolFormula, empty: f64) -> Result<SatGadget> {
    let n = formula.n();
    if n > SAT_MAX_N {
        return Err(Error::SizeLimit { n, limit: SAT_MAX_N });
    }
    let database = Database::new((1..=n).map(|j| Record::new(format!("F{j}"), j as f64)).collect())?;
    Ok(SatGadget {
        formula,
        database,
        empty,
    })
}

impl FunctionOracle<f64> for SatGadget {
    type Output = f64;

    fn empty_value(&self) -> f64 {
        self.empty
    }

    fn evaluate(&self, records: &[&Record<f64>]) -> std::result::Result<f64, OracleError> {
        let mut x = vec![true; self.formula.n()];
        for r in records {
            let j = r.value as usize;
            match x.get_mut(j.wrapping_sub(1)) {
                Some(b) => *b = false,
                None => return Err(OracleError(format!("record `{}` is not a gadget variable", r.id))),
            }
        }
        Ok(records.len() as f64 - f64::from(u8::from(self.formula.eval(&x))))
    }
}
