use crate::database::Record;
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, OracleError};

use super::{check_delta, sorted_finite};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderedStatKind {
    Mean,
    /// Drops `⌊α·n⌋` entries from each end; `α ∈ [0, 0.5)`.
    TrimmedMean(f64),
    /// Even sizes average the two middle entries.
    Median,
    Minimum,
    Maximum,
}

impl OrderedStatKind {
    pub fn name(&self) -> &'static str {
        match self {
            OrderedStatKind::Mean => "mean",
            OrderedStatKind::TrimmedMean(_) => "trimmed-mean",
            OrderedStatKind::Median => "median",
            OrderedStatKind::Minimum => "min",
            OrderedStatKind::Maximum => "max",
        }
    }

    /// The statistic of a nonempty, ascending slice.
    pub fn evaluate_sorted(&self, x: &[f64]) -> f64 {
        debug_assert!(!x.is_empty());
        match *self {
            OrderedStatKind::Mean => x.iter().sum::<f64>() / x.len() as f64,
            OrderedStatKind::TrimmedMean(alpha) => {
                let t = trim_count(alpha, x.len());
                if x.len() <= 2 * t {
                    median_sorted(x)
                } else {
                    let inner = &x[t..x.len() - t];
                    inner.iter().sum::<f64>() / inner.len() as f64
                }
            }
            OrderedStatKind::Median => median_sorted(x),
            OrderedStatKind::Minimum => x[0],
            OrderedStatKind::Maximum => x[x.len() - 1],
        }
    }
}

fn trim_count(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).floor() as usize
}

fn median_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        (x[n / 2 - 1] + x[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedStatSpec {
    kind: OrderedStatKind,
    empty_value: f64,
}

impl OrderedStatSpec {
    pub fn new(kind: OrderedStatKind, empty_value: f64) -> Result<Self> {
        if let OrderedStatKind::TrimmedMean(alpha) = kind {
            if !(0.0..0.5).contains(&alpha) {
                return Err(Error::invalid(format!(
                    "trim fraction must be in [0, 0.5), got {alpha}"
                )));
            }
        }
        if !empty_value.is_finite() {
            return Err(Error::invalid(format!("empty value must be finite, got {empty_value}")));
        }
        Ok(OrderedStatSpec { kind, empty_value })
    }

    pub fn kind(&self) -> OrderedStatKind {
        self.kind
    }

    pub fn empty_value(&self) -> f64 {
        self.empty_value
    }
}

/// The statistic as a general oracle over 1-D records.
#[derive(Debug, Clone, Copy)]
pub struct StatisticOracle(pub OrderedStatSpec);

impl FunctionOracle<f64> for StatisticOracle {
    type Output = f64;

    fn empty_value(&self) -> f64 {
        self.0.empty_value
    }

    fn evaluate(&self, records: &[&Record<f64>]) -> Result<f64, OracleError> {
        let mut x: Vec<f64> = records.iter().map(|r| r.value).collect();
        x.sort_by(f64::total_cmp);
        Ok(self.0.kind.evaluate_sorted(&x))
    }
}

/// `g(D)` for a sorted-window statistic with uniform `Δ`, in `O(n²)`.
///
/// Window `(i, k)` covers sorted entries `i..i+k`. Its `Upper` comes from
/// `(i, k−1)` (largest entry removed) and its `Lower` from `(i+1, k−1)`
/// (smallest entry removed). Two rows of the table are kept.
pub fn preprocess_ordered(spec: &OrderedStatSpec, delta: f64, values: &[f64]) -> Result<f64> {
    check_delta(delta)?;
    let x = sorted_finite(values)?;
    let n = x.len();
    if n == 0 {
        return Ok(spec.empty_value);
    }

    let mut prefix = Vec::new();
    if let OrderedStatKind::TrimmedMean(_) = spec.kind {
        prefix.reserve(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &v in &x {
            acc += v;
            prefix.push(acc);
        }
    }

    let mut g_prev = vec![spec.empty_value; n + 1];
    let mut g_cur = vec![0.0; n + 1];
    let mut mean_prev = vec![0.0; n + 1];
    let mut mean_cur = vec![0.0; n + 1];

    for k in 1..=n {
        let kf = k as f64;
        for i in 0..=n - k {
            let last = x[i + k - 1];
            let target = match spec.kind {
                OrderedStatKind::Mean => {
                    let m = if k == 1 {
                        last
                    } else {
                        (kf - 1.0) / kf * mean_prev[i] + last / kf
                    };
                    mean_cur[i] = m;
                    m
                }
                OrderedStatKind::TrimmedMean(alpha) => {
                    let t = trim_count(alpha, k);
                    if k <= 2 * t {
                        median_sorted(&x[i..i + k])
                    } else {
                        (prefix[i + k - t] - prefix[i + t]) / (k - 2 * t) as f64
                    }
                }
                OrderedStatKind::Median => median_sorted(&x[i..i + k]),
                OrderedStatKind::Minimum => x[i],
                OrderedStatKind::Maximum => last,
            };
            let upper = g_prev[i] + delta;
            let lower = g_prev[i + 1] - delta;
            g_cur[i] = if upper <= target {
                upper
            } else if lower >= target {
                lower
            } else {
                target
            };
        }
        std::mem::swap(&mut g_prev, &mut g_cur);
        std::mem::swap(&mut mean_prev, &mut mean_cur);
    }
    Ok(g_prev[0])
}
