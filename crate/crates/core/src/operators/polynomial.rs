use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative threshold below which a sum of two coefficients is treated as exact cancellation.
pub const CANCEL_EPS: f64 = 1e-12;

/// `x + y`, snapped to zero when the terms cancel up to rounding.
pub(crate) fn cancel_add(x: f64, y: f64) -> f64 {
    let s = x + y;
    if s.abs() <= CANCEL_EPS * (x.abs() + y.abs()) {
        0.0
    } else {
        s
    }
}

/// Real polynomial `Σ δ_j z^j`, stored with trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    pub fn monomial(coeff: f64, degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = coeff;
        Polynomial::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^j` (zero past the degree).
    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// `Some((δ, m))` when the polynomial is a single term `δ z^m` with `m ≥ 1`.
    pub fn as_monomial(&self) -> Option<(f64, usize)> {
        let m = self.degree()?;
        (m >= 1 && self.coeffs[..m].iter().all(|&c| c == 0.0)).then(|| (self.coeffs[m], m))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// Compensated Horner evaluation; accurate to roughly twice working precision.
    pub fn eval_compensated(&self, z: f64) -> f64 {
        let mut s = 0.0f64;
        let mut err = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            let p = s * z;
            let pe = s.mul_add(z, -p);
            let t = p + c;
            let bb = t - p;
            let se = (p - (t - bb)) + (c - bb);
            s = t;
            err = err * z + (pe + se);
        }
        s + err
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|j| cancel_add(self.coeff(j), other.coeff(j))).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = cancel_add(out[i + j], a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, m: usize) -> Polynomial {
        (0..m).fold(Polynomial::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `self ∘ inner`, i.e. `z ↦ self(inner(z))`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, &c| {
            acc.mul(inner).add(&Polynomial::constant(c))
        })
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * j as f64)
                .collect(),
        )
    }

    /// `F(z) - z`, whose real roots are the fixed points of `F`.
    pub fn minus_identity(&self) -> Polynomial {
        self.sub(&Polynomial::identity())
    }

    /// Coefficients scaled so the largest magnitude is one.
    fn normalized(&self) -> Polynomial {
        let m = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if m == 0.0 {
            return Polynomial::zero();
        }
        self.scale(1.0 / m)
    }

    /// Euclidean division. Remainder coefficients below `tol` (relative to the
    /// dividend scale) are dropped.
    pub fn div_rem(&self, divisor: &Polynomial, tol: f64) -> (Polynomial, Polynomial) {
        let Some(dd) = divisor.degree() else {
            panic!("division by the zero polynomial");
        };
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        let mut rem = self.coeffs.clone();
        let lead = divisor.leading();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * c;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        for c in rem.iter_mut() {
            if c.abs() <= tol * scale {
                *c = 0.0;
            }
        }
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Approximate monic GCD via the Euclidean algorithm on normalized remainders.
    pub fn gcd(&self, other: &Polynomial, tol: f64) -> Polynomial {
        let (mut a, mut b) = (self.normalized(), other.normalized());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b, tol);
            a = b;
            b = r.normalized();
        }
        if a.is_zero() {
            return a;
        }
        a.scale(1.0 / a.leading())
    }

    /// Square-free part `p / gcd(p, p')`; every root of `p` is a simple root of the result.
    pub fn square_free(&self, tol: f64) -> Polynomial {
        if self.degree().unwrap_or(0) <= 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative(), tol);
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g, tol).0
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            match (j, mag == 1.0) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}z")?,
                (_, true) => write!(f, "z^{j}")?,
                (_, false) => write!(f, "{mag}z^{j}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_strips_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::new(vec![0.0]).degree(), None);
    }

    #[test]
    fn eval_and_arithmetic() {
        let a = Polynomial::new(vec![1.0, 0.0, 1.0]); // 1 + t^2
        let f = Polynomial::monomial(1.0, 2);
        let diff = a.sub(&f.compose(&a));
        assert_eq!(diff, Polynomial::new(vec![0.0, 0.0, -1.0, 0.0, -1.0]));
        for t in [0.0, 1.0, -1.0, 2.0] {
            let expect = (1.0 + t * t) - (1.0 + t * t) * (1.0 + t * t);
            assert_eq!(diff.eval(t), expect);
        }
    }

    #[test]
    fn monomial_detection() {
        assert_eq!(Polynomial::monomial(2.0, 3).as_monomial(), Some((2.0, 3)));
        assert_eq!(Polynomial::new(vec![1.0, 0.0, 1.0]).as_monomial(), None);
        assert_eq!(Polynomial::constant(3.0).as_monomial(), None);
    }

    #[test]
    fn square_free_removes_repeated_factors() {
        // (z - 1)^2 (z + 2)
        let p = Polynomial::new(vec![-1.0, 1.0])
            .pow(2)
            .mul(&Polynomial::new(vec![2.0, 1.0]));
        let s = p.square_free(1e-9);
        assert_eq!(s.degree(), Some(2));
        assert!(s.eval(1.0).abs() < 1e-9 && s.eval(-2.0).abs() < 1e-9);
    }

    #[test]
    fn compensated_eval_agrees() {
        let p = Polynomial::new(vec![0.3, -1.7, 0.2, 0.9, -0.4]);
        for t in [-2.0, -0.3, 0.7, 1.9] {
            assert!((p.eval(t) - p.eval_compensated(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]).to_string(), "z^3");
        assert_eq!(Polynomial::new(vec![-1.0, 1.0]).to_string(), "-1 + z");
    }
}
