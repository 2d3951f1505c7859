//! Two-dimensional preprocessing under ℓ1 individual sensitivity.
//!
//! In the rotated coordinates `u = x1 + x2`, `v = x1 − x2` an ℓ1 ball of
//! radius `r` is the axis-aligned square `|u − u_c| ≤ r`, `|v − v_c| ≤ r`, so
//! any intersection of ℓ1 balls is an axis-aligned box in `(u, v)`. The map
//! `(x1, x2) ↦ (u, v)` is √2 times a rotation, so the ℓ2-nearest point of the
//! box is found by clamping `u` and `v` separately.

use std::fmt;

use crate::database::{CanonicalValue, Database, Record, SensitivityBounds};
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, OracleError};
use crate::preprocess::{build_lattice, preprocess_with, PreprocessOptions, Preprocessed, FEASIBILITY_RTOL};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }

    pub fn l1_distance(&self, other: &Point2) -> f64 {
        (self.x1 - other.x1).abs() + (self.x2 - other.x2).abs()
    }

    pub fn l2_distance(&self, other: &Point2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    fn u(&self) -> f64 {
        self.x1 + self.x2
    }

    fn v(&self) -> f64 {
        self.x1 - self.x2
    }

    fn from_uv(u: f64, v: f64) -> Self {
        Point2::new((u + v) / 2.0, (u - v) / 2.0)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// `{x : ‖x − center‖₁ ≤ radius}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Ball {
    pub center: Point2,
    pub radius: f64,
}

impl L1Ball {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::invalid(format!(
                "ball radius must be finite and ≥ 0, got {radius}"
            )));
        }
        Ok(L1Ball { center, radius })
    }

    pub fn contains(&self, p: &Point2, tol: f64) -> bool {
        self.center.l1_distance(p) <= self.radius + tol
    }
}

/// Nonempty box in `(u, v)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedBox {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl RotatedBox {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if u_min <= u_max && v_min <= v_max {
            Ok(RotatedBox {
                u_min,
                u_max,
                v_min,
                v_max,
            })
        } else {
            Err(Error::invalid(format!(
                "empty box u∈[{u_min}, {u_max}], v∈[{v_min}, {v_max}]"
            )))
        }
    }

    pub fn contains(&self, p: &Point2, tol: f64) -> bool {
        let (u, v) = (p.u(), p.v());
        self.u_min - tol <= u && u <= self.u_max + tol && self.v_min - tol <= v && v <= self.v_max + tol
    }

    /// Maps a point of the unit square `[0,1]²` onto the box.
    pub fn point_at(&self, s: f64, t: f64) -> Point2 {
        Point2::from_uv(
            self.u_min + s * (self.u_max - self.u_min),
            self.v_min + t * (self.v_max - self.v_min),
        )
    }
}

fn raw_bounds(balls: &[L1Ball]) -> (f64, f64, f64, f64) {
    let mut u = (f64::NEG_INFINITY, f64::INFINITY);
    let mut v = (f64::NEG_INFINITY, f64::INFINITY);
    for b in balls {
        let (cu, cv) = (b.center.u(), b.center.v());
        u.0 = u.0.max(cu - b.radius);
        u.1 = u.1.min(cu + b.radius);
        v.0 = v.0.max(cv - b.radius);
        v.1 = v.1.min(cv + b.radius);
    }
    (u.0, u.1, v.0, v.1)
}

/// Intersection of a nonempty list of ℓ1 balls; `Ok(None)` when empty.
pub fn intersect_balls(balls: &[L1Ball]) -> Result<Option<RotatedBox>> {
    if balls.is_empty() {
        return Err(Error::invalid("intersection of an empty list of balls"));
    }
    let (u_min, u_max, v_min, v_max) = raw_bounds(balls);
    Ok(RotatedBox::new(u_min, u_max, v_min, v_max).ok())
}

/// The ℓ2-closest point of `bx` to `target`.
pub fn project_to_box(bx: &RotatedBox, target: Point2) -> Point2 {
    let u = target.u().clamp(bx.u_min, bx.u_max);
    let v = target.v().clamp(bx.v_min, bx.v_max);
    if u == target.u() && v == target.v() {
        target
    } else {
        Point2::from_uv(u, v)
    }
}

// Rounding in `g(D − x_i) ± Δ_i` can invert a degenerate side by an ulp or
// two; such sides collapse to their midpoint.
fn tolerant_box(balls: &[L1Ball]) -> Result<RotatedBox> {
    let (mut u_min, mut u_max, mut v_min, mut v_max) = raw_bounds(balls);
    for (lo, hi) in [(&mut u_min, &mut u_max), (&mut v_min, &mut v_max)] {
        if *lo > *hi {
            let scale = lo.abs().max(hi.abs()).max(1.0);
            if *lo - *hi > FEASIBILITY_RTOL * scale {
                return Err(Error::InvariantViolation(format!(
                    "empty ℓ1-ball intersection: side [{lo}, {hi}]"
                )));
            }
            let mid = (*lo + *hi) / 2.0;
            *lo = mid;
            *hi = mid;
        }
    }
    RotatedBox::new(u_min, u_max, v_min, v_max)
}

/// Computes the 2-D recursion on every subset of `db`.
pub fn preprocess_2d<V, F>(f: &F, bounds: &SensitivityBounds, db: &Database<V>) -> Result<Preprocessed<V, Point2>>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = Point2>,
{
    preprocess_2d_with(f, bounds, db, PreprocessOptions::default())
}

pub fn preprocess_2d_with<V, F>(
    f: &F,
    bounds: &SensitivityBounds,
    db: &Database<V>,
    options: PreprocessOptions,
) -> Result<Preprocessed<V, Point2>>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = Point2>,
{
    let mut balls = Vec::new();
    build_lattice(f, bounds, db, options, |subset, target, memo, deltas| {
        balls.clear();
        for i in subset.members() {
            balls.push(L1Ball {
                center: memo.require(subset.without(i))?,
                radius: deltas[i],
            });
        }
        Ok(project_to_box(&tolerant_box(&balls)?, target))
    })
}

struct Coordinate<'a, F> {
    inner: &'a F,
    second: bool,
}

impl<V, F: FunctionOracle<V, Output = Point2>> FunctionOracle<V> for Coordinate<'_, F> {
    type Output = f64;

    fn empty_value(&self) -> f64 {
        let p = self.inner.empty_value();
        if self.second {
            p.x2
        } else {
            p.x1
        }
    }

    fn evaluate(&self, records: &[&Record<V>]) -> std::result::Result<f64, OracleError> {
        let p = self.inner.evaluate(records)?;
        Ok(if self.second { p.x2 } else { p.x1 })
    }
}

/// Runs the one-dimensional recursion on each coordinate independently, with
/// its own per-coordinate bounds.
pub fn preprocess_per_coordinate<V, F>(
    f: &F,
    bounds_x1: &SensitivityBounds,
    bounds_x2: &SensitivityBounds,
    db: &Database<V>,
) -> Result<Point2>
where
    V: CanonicalValue,
    F: FunctionOracle<V, Output = Point2>,
{
    let opts = PreprocessOptions::default();
    let a = preprocess_with(
        &Coordinate {
            inner: f,
            second: false,
        },
        bounds_x1,
        db,
        opts,
    )?;
    let b = preprocess_with(&Coordinate { inner: f, second: true }, bounds_x2, db, opts)?;
    Ok(Point2::new(a.value, b.value))
}
