//! Pairwise-versus-total intersection of norm balls.
//!
//! In the plane, ℓ1 balls that intersect pairwise always share a common
//! point. Neither fact survives in ℓ1 for three dimensions or in ℓ2 for two;
//! the checks here reproduce both counterexamples by grid minimization.
//!
//! Emptiness certificate: `F(x) = max_i (‖x − c_i‖ − r_i)` is 1-Lipschitz in
//! the ball norm, and every point of the search box lies within half a grid
//! step per coordinate of a grid point. That is at most `d·res/2` in ℓ1 and
//! `√d·res/2` in ℓ2, both below [`GRID_MARGIN`] for `d ≤ 3`, so a grid
//! minimum above the margin proves `F > 0` everywhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo2d::{intersect_balls, L1Ball, Point2};

pub const GRID_RESOLUTION: f64 = 0.01;
pub const GRID_MARGIN: f64 = 0.02;

/// An ℓ1 ball in `ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallD {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallD {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        BallD { center, radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionCheck {
    pub pairwise_nonempty: bool,
    pub total_nonempty: bool,
    /// Minimum of `max_i(‖x − c_i‖₁ − r_i)` over the grid, for grid-decided
    /// cases; `None` when decided exactly.
    pub grid_min: Option<f64>,
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum of `objective` over the grid `lo + k·res` (last point clamped to
/// `hi`) in every coordinate. `+∞` when the box is empty.
pub fn grid_min<F>(lo: &[f64], hi: &[f64], res: f64, objective: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return f64::INFINITY;
    }
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&l, &h)| {
            let steps = ((h - l) / res).ceil() as usize;
            (0..=steps).map(|k| (l + k as f64 * res).min(h)).collect()
        })
        .collect();
    let d = axes.len();
    if d == 0 {
        return objective(&[]);
    }
    axes[0]
        .par_iter()
        .map(|&x0| {
            let mut point = vec![0.0; d];
            point[0] = x0;
            let mut idx = vec![0usize; d];
            let mut best = f64::INFINITY;
            loop {
                for j in 1..d {
                    point[j] = axes[j][idx[j]];
                }
                best = best.min(objective(&point));
                // Odometer over coordinates 1..d.
                let mut j = 1;
                while j < d {
                    idx[j] += 1;
                    if idx[j] < axes[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == d {
                    return best;
                }
            }
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Whether the ℓ1 balls meet pairwise and all together. `d = 2` is decided
/// exactly; `d = 3` by grid minimization over the intersection of the balls'
/// bounding boxes, reporting empty iff the minimum exceeds [`GRID_MARGIN`].
pub fn pairwise_vs_total_intersection(d: usize, balls: &[BallD]) -> Result<IntersectionCheck> {
    if d != 2 && d != 3 {
        return Err(Error::invalid(format!("unsupported dimension {d}; expected 2 or 3")));
    }
    if balls.is_empty() {
        return Err(Error::invalid("no balls given"));
    }
    for b in balls {
        let radius_ok = b.radius.is_finite() && b.radius >= 0.0;
        if b.center.len() != d || !radius_ok || b.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!(
                "ball {b:?} is not a valid {d}-dimensional ball"
            )));
        }
    }
    let pairwise_nonempty = balls.iter().enumerate().all(|(i, a)| {
        balls[i + 1..]
            .iter()
            .all(|b| l1(&a.center, &b.center) <= a.radius + b.radius)
    });

    if d == 2 {
        let planar: Vec<L1Ball> = balls
            .iter()
            .map(|b| L1Ball::new(Point2::new(b.center[0], b.center[1]), b.radius))
            .collect::<Result<_>>()?;
        return Ok(IntersectionCheck {
            pairwise_nonempty,
            total_nonempty: intersect_balls(&planar)?.is_some(),
            grid_min: None,
        });
    }

    let (lo, hi) = bounding_box(balls.iter().map(|b| (b.center.as_slice(), b.radius)), d);
    let min = grid_min(&lo, &hi, GRID_RESOLUTION, |x| {
        balls
            .iter()
            .map(|b| l1(x, &b.center) - b.radius)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(IntersectionCheck {
        pairwise_nonempty,
        total_nonempty: min <= GRID_MARGIN,
        grid_min: Some(min),
    })
}

// Every norm ball lies in the axis box `c ± r`.
fn bounding_box<'a>(balls: impl Iterator<Item = (&'a [f64], f64)>, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::NEG_INFINITY; d];
    let mut hi = vec![f64::INFINITY; d];
    for (c, r) in balls {
        for j in 0..d {
            lo[j] = lo[j].max(c[j] - r);
            hi[j] = hi[j].min(c[j] + r);
        }
    }
    (lo, hi)
}

/// True iff the planar ℓ2 balls of common `radius` are pairwise tangent
/// (centre distances `2·radius` within `1e−12`) and the grid certifies that
/// they have no common point.
pub fn l2_counterexample_check(centers: &[Point2], radius: f64) -> bool {
    let pts: Vec<[f64; 2]> = centers.iter().map(|p| [p.x1, p.x2]).collect();
    let tangent = pts
        .iter()
        .enumerate()
        .all(|(i, a)| pts[i + 1..].iter().all(|b| (l2(a, b) - 2.0 * radius).abs() <= 1e-12));
    if !tangent {
        return false;
    }
    let (lo, hi) = bounding_box(pts.iter().map(|c| (c.as_slice(), radius)), 2);
    let min = grid_min(&lo, &hi, GRID_RESOLUTION, |x| {
        pts.iter().map(|c| l2(x, c) - radius).fold(f64::NEG_INFINITY, f64::max)
    });
    min > GRID_MARGIN
}

/// Unit ℓ2 discs at `(−1, 0)`, `(1, 0)`, `(0, √3)`: pairwise tangent, no
/// common point.
pub fn lp_ball_counterexample_check() -> bool {
    let centers = [
        Point2::new(-1.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.0, 3f64.sqrt()),
    ];
    l2_counterexample_check(&centers, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ball() {
        for d in [2, 3] {
            let r = pairwise_vs_total_intersection(d, &[BallD::new(vec![0.5; d], 1.0)]).unwrap();
            assert!(r.pairwise_nonempty && r.total_nonempty);
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert!(pairwise_vs_total_intersection(4, &[BallD::new(vec![0.0; 4], 1.0)]).is_err());
        assert!(pairwise_vs_total_intersection(3, &[BallD::new(vec![0.0; 2], 1.0)]).is_err());
    }

    #[test]
    fn l2_variants() {
        assert!(lp_ball_counterexample_check());
        let same = [Point2::new(0.0, 0.0); 3];
        assert!(!l2_counterexample_check(&same, 1.0));
        let close = [Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), Point2::new(0.0, 0.5)];
        assert!(!l2_counterexample_check(&close, 1.0));
    }

    #[test]
    fn grid_min_of_distance() {
        let m = grid_min(&[-1.0, -1.0], &[1.0, 1.0], 0.1, |x| {
            (x[0] - 0.3).abs() + (x[1] + 0.2).abs()
        });
        assert!(m < 1e-12);
        assert_eq!(grid_min(&[1.0], &[0.0], 0.1, |_| 0.0), f64::INFINITY);
    }
}
