use crate::error::{Error, Result};

/// `max_r |ln P(r) − ln Q(r)|` over two output distributions on the same
/// finite range. Outcomes with zero mass under both are skipped; zero mass
/// under only one is a support mismatch.
pub fn privacy_ratio_audit_tables(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "probability tables have {} and {} outcomes",
            p.len(),
            q.len()
        )));
    }
    let mut worst = 0.0f64;
    for (r, (&a, &b)) in p.iter().zip(q).enumerate() {
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::invalid(format!("negative or NaN probability at outcome {r}")));
        }
        match (a > 0.0, b > 0.0) {
            (false, false) => {}
            (true, true) => worst = worst.max((a.ln() - b.ln()).abs()),
            _ => return Err(Error::invalid(format!("supports differ at outcome {r}"))),
        }
    }
    Ok(worst)
}

/// `max_x |log p(x) − log q(x)|` over `grid`, given both log-densities.
pub fn privacy_ratio_audit_pdf<P, Q>(log_p: P, log_q: Q, grid: &[f64]) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
    Q: Fn(f64) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for &x in grid {
        let (a, b) = (log_p(x)?, log_q(x)?);
        if a.is_finite() != b.is_finite() {
            return Err(Error::invalid(format!("supports differ at x = {x}")));
        }
        if a.is_finite() {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
