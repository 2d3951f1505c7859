//! Quadratic-time instantiations for sorted-window statistics and variance.
//!
//! For mean, trimmed mean, median, minimum and maximum the neighbours that
//! decide `Upper`/`Lower` are always the ones dropping the largest and the
//! smallest entry, so only the `O(n²)` contiguous windows of the sorted data
//! are ever needed. Variance has the same property for `Upper`, and its
//! `Lower` never binds when `g(∅) = 0`.

mod bounds;
mod envelope;
mod ordered;
mod variance;

pub use bounds::{mean_error_bound, variance_error_bound};
pub use envelope::{mean_bounding, MeanEnvelope};
pub use ordered::{preprocess_ordered, OrderedStatKind, OrderedStatSpec, StatisticOracle};
pub use variance::{
    preprocess_variance, preprocess_variance_with_witness, var_from_parts, variance, VarianceOracle, VarianceOutcome,
};

use crate::error::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "Δ must be finite and non-negative, got {delta}"
        )))
    }
}

pub(crate) fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite data value {bad}")));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    Ok(x)
}
