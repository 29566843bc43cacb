use std::fmt;

use serde::{Deserialize, Serialize};

/// Map tolerance for comparing affine coefficients.
pub const MAP_EPS: f64 = 1e-12;

/// `t ↦ slope·t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineMap {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        AffineMap { slope, intercept }
    }

    pub const fn identity() -> Self {
        AffineMap::new(1.0, 0.0)
    }

    /// The constant map `t ↦ c`, used for point evaluation.
    pub const fn constant(c: f64) -> Self {
        AffineMap::new(0.0, c)
    }

    pub fn apply(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }

    pub fn is_constant(&self) -> bool {
        self.slope == 0.0
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        AffineMap::new(self.slope * inner.slope, self.slope * inner.intercept + self.intercept)
    }

    /// m-fold self-composition; `m = 0` is the identity.
    pub fn iterate(&self, m: u32) -> AffineMap {
        let s = self.slope;
        let geometric = if s == 1.0 {
            f64::from(m)
        } else {
            (s.powi(m as i32) - 1.0) / (s - 1.0)
        };
        AffineMap::new(s.powi(m as i32), self.intercept * geometric)
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        (self.slope != 0.0).then(|| AffineMap::new(1.0 / self.slope, -self.intercept / self.slope))
    }

    pub fn approx_eq(&self, other: &AffineMap) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= MAP_EPS * 1f64.max(a.abs()).max(b.abs());
        close(self.slope, other.slope) && close(self.intercept, other.intercept)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope, self.intercept) {
            (0.0, c) => write!(f, "t ↦ {c}"),
            (s, 0.0) => write!(f, "t ↦ {s}t"),
            (s, c) if c < 0.0 => write!(f, "t ↦ {s}t - {}", -c),
            (s, c) => write!(f, "t ↦ {s}t + {c}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterate_examples() {
        let shift = AffineMap::new(1.0, -1.0);
        assert_eq!(shift.iterate(3), AffineMap::new(1.0, -3.0));
        assert_eq!(AffineMap::new(2.0, 1.0).iterate(2), AffineMap::new(4.0, 3.0));
        assert_eq!(AffineMap::new(0.3, 5.0).iterate(0), AffineMap::identity());
    }

    #[test]
    fn composition_order() {
        let u = AffineMap::new(1.0, -1.0);
        let s = AffineMap::new(0.5, 0.0);
        // u(s(t)) = t/2 - 1, s(u(t)) = t/2 - 1/2
        assert_eq!(u.after(&s), AffineMap::new(0.5, -1.0));
        assert_eq!(s.after(&u), AffineMap::new(0.5, -0.5));
        let inv = s.inverse().unwrap();
        assert!(inv.after(&s).approx_eq(&AffineMap::identity()));
        assert!(AffineMap::constant(2.0).inverse().is_none());
    }
}
