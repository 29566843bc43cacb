use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Polynomial;

pub const DEFAULT_FIXPOINT_TOL: f64 = 1e-10;

/// Real fixed points `{z : F(z) = z}` of a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    /// Ascending; each satisfies `|F(z) - z| ≤ tol`.
    pub points: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tol: f64,
    /// Candidate roots whose residual could not be pushed below `tol`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<(f64, f64)>,
}

impl FixedPointSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether `z` is one of the listed points, up to `eps` relative.
    pub fn contains(&self, z: f64, eps: f64) -> bool {
        self.points.iter().any(|p| (p - z).abs() <= eps * (1.0 + z.abs()))
    }
}

impl fmt::Display for FixedPointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.points.is_empty() {
            return write!(f, "{{}}");
        }
        let pts: Vec<String> = self.points.iter().map(|p| format!("{p}")).collect();
        write!(f, "{{{}}}", pts.join(", "))
    }
}

/// `1 + max_{j<n} |c_j| / |c_n|`; every real root lies within it.
pub fn cauchy_bound(p: &Polynomial) -> f64 {
    let lead = p.leading().abs();
    let n = p.degree().unwrap_or(0);
    1.0 + p.coeffs()[..n].iter().fold(0.0f64, |m, c| m.max(c.abs() / lead))
}

fn bisect(p: &Polynomial, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = p.eval_compensated(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = p.eval_compensated(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if p.eval_compensated(lo).abs() <= p.eval_compensated(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Real roots of `p` in `[lo, hi]` at which `p` changes sign or vanishes
/// exactly. Critical points split the range into monotone pieces, each of
/// which holds at most one root.
pub fn sign_change_roots(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    match p.degree() {
        None | Some(0) => return Vec::new(),
        Some(1) => {
            let z = -p.coeff(0) / p.coeff(1);
            return if (lo..=hi).contains(&z) { vec![z] } else { Vec::new() };
        }
        _ => {}
    }
    let mut knots = vec![lo];
    knots.extend(sign_change_roots(&p.derivative(), lo, hi));
    knots.push(hi);
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (f0, f1) = (p.eval_compensated(x0), p.eval_compensated(x1));
        if f0 == 0.0 {
            out.push(x0);
        } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            out.push(bisect(p, x0, x1));
        }
    }
    if p.eval_compensated(hi) == 0.0 {
        out.push(hi);
    }
    out
}

fn critical_points(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    sign_change_roots(&p.derivative(), lo, hi)
}

/// The scan range used for `F`: the Cauchy bound of the square-free part of
/// `F(z) - z`.
pub fn scan_range(f: &Polynomial, tol: f64) -> Option<(f64, f64)> {
    let g = f.minus_identity();
    if g.degree().unwrap_or(0) == 0 {
        return None;
    }
    let s = g.square_free(tol);
    let r = cauchy_bound(&s).max(cauchy_bound(&g));
    Some((-r, r))
}

/// All real fixed points of `F`.
///
/// Roots of the square-free part of `F(z) - z` are isolated by sign-change
/// bisection on monotone segments; critical points where the residual already
/// meets `tol` catch tangential roots the square-free reduction may have missed.
pub fn fixed_points(f: &Polynomial, tol: f64) -> Result<FixedPointSet> {
    let g = f.minus_identity();
    if g.is_zero() {
        return Err(Error::DegenerateAllFixed);
    }
    let Some((lo, hi)) = scan_range(f, tol) else {
        return Ok(FixedPointSet {
            points: Vec::new(),
            residuals: Vec::new(),
            tol,
            unresolved: Vec::new(),
        });
    };
    let s = g.square_free(tol);
    let mut candidates = sign_change_roots(&s, lo, hi);
    candidates.extend(sign_change_roots(&g, lo, hi));
    candidates.extend(
        critical_points(&g, lo, hi)
            .into_iter()
            .filter(|&c| g.eval_compensated(c).abs() <= tol),
    );
    candidates.sort_by(f64::total_cmp);

    let residual = |z: f64| g.eval_compensated(z).abs();
    let mut merged: Vec<f64> = Vec::new();
    for z in candidates {
        match merged.last_mut() {
            Some(last) if (z - *last).abs() <= 1e-9 * (1.0 + z.abs()) => {
                if residual(z) < residual(*last) {
                    *last = z;
                }
            }
            _ => merged.push(z),
        }
    }

    let mut out = FixedPointSet {
        points: Vec::new(),
        residuals: Vec::new(),
        tol,
        unresolved: Vec::new(),
    };
    for z in merged {
        let r = residual(z);
        if r <= tol {
            out.points.push(z);
            out.residuals.push(r);
        } else {
            out.unresolved.push((z, r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_has_three_fixed_points() {
        let fp = fixed_points(&Polynomial::monomial(1.0, 3), 1e-10).unwrap();
        assert_eq!(fp.points.len(), 3);
        for (got, want) in fp.points.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_is_degenerate() {
        assert_eq!(
            fixed_points(&Polynomial::identity(), 1e-10),
            Err(Error::DegenerateAllFixed)
        );
    }

    #[test]
    fn shift_has_none() {
        let f = Polynomial::new(vec![-1.0, 1.0]);
        assert!(fixed_points(&f, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn double_root_is_found() {
        // F(z) - z = (z - 1/2)^2
        let g = Polynomial::new(vec![-0.5, 1.0]).pow(2);
        let f = g.add(&Polynomial::identity());
        let fp = fixed_points(&f, 1e-10).unwrap();
        assert_eq!(fp.points.len(), 1);
        assert!((fp.points[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn constant_polynomial() {
        // F(z) = 2: the only fixed point is 2
        let fp = fixed_points(&Polynomial::constant(2.0), 1e-10).unwrap();
        assert_eq!(fp.points, vec![2.0]);
    }
}
