use std::ops::Range;

use crate::database::Record;
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, OracleError};

use super::{check_delta, sorted_finite};

/// Population variance (divide by `n`); `0` for the empty slice.
pub fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

/// `Var(D)` from the variances of `D − x_a`, `D − x_b` and `D − x_a − x_b`:
///
/// `((n−1)/n)²·(Var(D−x_a) + Var(D−x_b)) − ((n−2)/n)²·Var(D−x_a−x_b) + (x_a−x_b)²/n²`
pub fn var_from_parts(var_a: f64, var_b: f64, var_ab: f64, x_a: f64, x_b: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("need n ≥ 2 to split off two entries, got {n}")));
    }
    Ok(parts(var_a, var_b, var_ab, x_a, x_b, n as f64))
}

#[inline]
fn parts(var_a: f64, var_b: f64, var_ab: f64, x_a: f64, x_b: f64, n: f64) -> f64 {
    let c1 = (n - 1.0) / n;
    let c2 = (n - 2.0) / n;
    let d = (x_a - x_b) / n;
    (c1 * c1 * (var_a + var_b) - c2 * c2 * var_ab + d * d).max(0.0)
}

/// Variance with `Var(∅) = 0` as a general oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct VarianceOracle;

impl FunctionOracle<f64> for VarianceOracle {
    type Output = f64;

    fn empty_value(&self) -> f64 {
        0.0
    }

    fn evaluate(&self, records: &[&Record<f64>]) -> Result<f64, OracleError> {
        let x: Vec<f64> = records.iter().map(|r| r.value).collect();
        Ok(variance(&x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceOutcome {
    pub value: f64,
    /// The input, ascending.
    pub sorted: Vec<f64>,
    /// Window `D′` of `sorted` with `value = Var(D′) + (n − |D′|)·Δ`.
    pub witness: Range<usize>,
}

/// `g(D)` for population variance with uniform `Δ` and `g(∅) = 0`.
pub fn preprocess_variance(delta: f64, values: &[f64]) -> Result<f64> {
    preprocess_variance_with_witness(delta, values).map(|o| o.value)
}

/// Runs `g(i,k) = min{Var(i,k), g(i,k−1) + Δ, g(i+1,k−1) + Δ}` over the
/// sorted windows, updating window variances in `O(1)` from the three
/// windows one and two entries shorter.
pub fn preprocess_variance_with_witness(delta: f64, values: &[f64]) -> Result<VarianceOutcome> {
    check_delta(delta)?;
    let x = sorted_finite(values)?;
    let n = x.len();
    if n == 0 {
        return Ok(VarianceOutcome {
            value: 0.0,
            sorted: x,
            witness: 0..0,
        });
    }

    // Rows are indexed by window start; row k−1 has a valid entry at i+1
    // for every window of length k, including the empty windows at k = 1.
    let mut var_km2 = vec![0.0; n + 2];
    let mut var_km1 = vec![0.0; n + 2];
    let mut var_k = vec![0.0; n + 2];
    let mut g_prev = vec![0.0; n + 1];
    let mut g_cur = vec![0.0; n + 1];
    let mut w_prev: Vec<(usize, usize)> = (0..=n).map(|i| (i, 0)).collect();
    let mut w_cur = w_prev.clone();

    for k in 1..=n {
        for i in 0..=n - k {
            let var = if k == n {
                variance(&x)
            } else if k == 1 {
                0.0
            } else {
                parts(var_km1[i], var_km1[i + 1], var_km2[i + 1], x[i + k - 1], x[i], k as f64)
            };
            var_k[i] = var;

            let drop_max = g_prev[i] + delta;
            let drop_min = g_prev[i + 1] + delta;
            let (g, w) = if var <= drop_max && var <= drop_min {
                (var, (i, k))
            } else if drop_max <= drop_min {
                (drop_max, w_prev[i])
            } else {
                (drop_min, w_prev[i + 1])
            };
            g_cur[i] = g;
            w_cur[i] = w;
        }
        std::mem::swap(&mut var_km2, &mut var_km1);
        std::mem::swap(&mut var_km1, &mut var_k);
        std::mem::swap(&mut g_prev, &mut g_cur);
        std::mem::swap(&mut w_prev, &mut w_cur);
    }

    let (start, len) = w_prev[0];
    Ok(VarianceOutcome {
        value: g_prev[0],
        sorted: x,
        witness: start..start + len,
    })
}
