//! Exact algebra of interval sets and closed-form piecewise expressions.

pub mod atomic;
pub mod interval;
pub mod piecewise;

pub use atomic::{AtomicExpr, TrigTerm};
pub use interval::{Interval, IntervalSet, ENDPOINT_EPS};
pub use piecewise::{Piece, PiecewiseExpr};

use crate::error::Result;
use crate::operators::Polynomial;

pub fn intersect(s1: &IntervalSet, s2: &IntervalSet) -> IntervalSet {
    s1.intersect(s2)
}

pub fn is_null(s: &IntervalSet) -> bool {
    s.is_null()
}

pub fn support(f: &PiecewiseExpr, window: &IntervalSet) -> IntervalSet {
    f.support(window)
}

pub fn expr_add(f: &PiecewiseExpr, g: &PiecewiseExpr) -> PiecewiseExpr {
    f.add(g)
}

pub fn expr_sub(f: &PiecewiseExpr, g: &PiecewiseExpr) -> PiecewiseExpr {
    f.sub(g)
}

pub fn expr_mul(f: &PiecewiseExpr, g: &PiecewiseExpr) -> Result<PiecewiseExpr> {
    f.mul(g)
}

pub fn expr_scale(f: &PiecewiseExpr, k: f64) -> PiecewiseExpr {
    f.scale(k)
}

pub fn poly_compose(poly: &Polynomial, f: &PiecewiseExpr) -> Result<PiecewiseExpr> {
    f.poly_compose(poly)
}
