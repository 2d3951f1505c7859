//! Closed-form accuracy guarantees for the mean and variance instantiations.

use crate::error::{Error, Result};

use super::{check_delta, mean, sorted_finite, variance};

fn nonempty(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid("error bound needs at least one entry"));
    }
    sorted_finite(values)
}

/// `max{|μ(D) − μ̂| − nΔ/3, 0} + Σ_i max{27|x_i − μ(D)|/n − Δ, 0}`.
pub fn mean_error_bound(mu_hat: f64, delta: f64, values: &[f64]) -> Result<f64> {
    check_delta(delta)?;
    let x = nonempty(values)?;
    let n = x.len() as f64;
    let mu = mean(&x);
    let centre = ((mu - mu_hat).abs() - n * delta / 3.0).max(0.0);
    let spread: f64 = x.iter().map(|v| (27.0 * (v - mu).abs() / n - delta).max(0.0)).sum();
    Ok(centre + spread)
}

/// `max{Var(D) − nΔ/2, 0} + Σ_i max{Σ_j 4(x_i − x_j)²/n² − Δ, 0}`.
///
/// The inner sum uses `Σ_j (x_i − x_j)² = n·((x_i − μ)² + Var(D))`.
pub fn variance_error_bound(delta: f64, values: &[f64]) -> Result<f64> {
    check_delta(delta)?;
    let x = nonempty(values)?;
    let n = x.len() as f64;
    let mu = mean(&x);
    let var = variance(&x);
    let head = (var - n * delta / 2.0).max(0.0);
    let tail: f64 = x
        .iter()
        .map(|v| (4.0 * ((v - mu) * (v - mu) + var) / n - delta).max(0.0))
        .sum();
    Ok(head + tail)
}
