use super::{check_delta, sorted_finite};
use crate::error::Result;

/// Linear-time lower and upper envelopes around the mean instantiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEnvelope {
    pub h_lower: f64,
    pub h_upper: f64,
}

/// `h_lower` recurses on `D − x_n` (largest entry removed each step, i.e.
/// along sorted prefixes); `h_upper` recurses on `D − x_1` (along sorted
/// suffixes). Each step clamps `μ` into `[h − Δ, h + Δ]`.
pub fn mean_bounding(mu_hat: f64, delta: f64, values: &[f64]) -> Result<MeanEnvelope> {
    check_delta(delta)?;
    let x = sorted_finite(values)?;
    let step = |h: f64, mu: f64| {
        if h + delta <= mu {
            h + delta
        } else if h - delta >= mu {
            h - delta
        } else {
            mu
        }
    };

    let mut h_lower = mu_hat;
    let mut sum = 0.0;
    for (k, &v) in x.iter().enumerate() {
        sum += v;
        h_lower = step(h_lower, sum / (k + 1) as f64);
    }

    let mut h_upper = mu_hat;
    sum = 0.0;
    for (k, &v) in x.iter().rev().enumerate() {
        sum += v;
        h_upper = step(h_upper, sum / (k + 1) as f64);
    }
    Ok(MeanEnvelope { h_lower, h_upper })
}
