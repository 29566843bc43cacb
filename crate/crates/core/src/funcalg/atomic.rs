//! Closed-form building blocks: polynomials plus polynomial-weighted sinusoids.
//!
//! An [`AtomicExpr`] is `p₀(t) + Σ_k [p_k(t) sin(ω_k t) + q_k(t) cos(ω_k t)]` with
//! distinct frequencies `ω_k > 0`. The sine/cosine basis makes the zero test
//! exact: the functions `t^j sin(ωt)`, `t^j cos(ωt)` and `t^j` are linearly
//! independent on every interval of positive length.

use std::fmt;

use crate::error::{Error, Result};
use crate::funcalg::interval::same_point;
use crate::operators::Polynomial;

/// One frequency block `sin_part(t)·sin(ωt) + cos_part(t)·cos(ωt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub omega: f64,
    pub sin_part: Polynomial,
    pub cos_part: Polynomial,
}

impl TrigTerm {
    fn is_zero(&self) -> bool {
        self.sin_part.is_zero() && self.cos_part.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicExpr {
    poly: Polynomial,
    trig: Vec<TrigTerm>,
}

fn snap_unit(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

impl AtomicExpr {
    pub fn zero() -> Self {
        AtomicExpr::default()
    }

    pub fn constant(c: f64) -> Self {
        AtomicExpr::poly(Polynomial::constant(c))
    }

    pub fn poly(p: Polynomial) -> Self {
        AtomicExpr {
            poly: p,
            trig: Vec::new(),
        }
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        AtomicExpr::poly(Polynomial::new(coeffs.to_vec()))
    }

    /// `weight(t) · sin(ωt + φ)`.
    pub fn sinusoid(weight: Polynomial, omega: f64, phase: f64) -> Self {
        if omega == 0.0 {
            return AtomicExpr::poly(weight.scale(snap_unit(phase.sin())));
        }
        let sign = omega.signum();
        let term = TrigTerm {
            omega: omega.abs(),
            sin_part: weight.scale(sign * snap_unit(phase.cos())),
            cos_part: weight.scale(snap_unit(phase.sin())),
        };
        AtomicExpr::zero().with_trig(vec![term])
    }

    fn with_trig(mut self, terms: impl IntoIterator<Item = TrigTerm>) -> Self {
        for term in terms {
            self.push_trig(term);
        }
        self
    }

    fn push_trig(&mut self, term: TrigTerm) {
        if term.is_zero() {
            return;
        }
        match self.trig.iter().position(|t| same_point(t.omega, term.omega)) {
            Some(k) => {
                let cur = &mut self.trig[k];
                cur.sin_part = cur.sin_part.add(&term.sin_part);
                cur.cos_part = cur.cos_part.add(&term.cos_part);
                if cur.is_zero() {
                    self.trig.remove(k);
                }
            }
            None => {
                let at = self.trig.partition_point(|t| t.omega < term.omega);
                self.trig.insert(at, term);
            }
        }
    }

    pub fn poly_part(&self) -> &Polynomial {
        &self.poly
    }

    pub fn trig_terms(&self) -> &[TrigTerm] {
        &self.trig
    }

    pub fn has_trig(&self) -> bool {
        !self.trig.is_empty()
    }

    /// Identically zero as a function; decided on coefficients, never by sampling.
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.trig.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.trig.is_empty() && self.poly.is_constant()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.trig.iter().fold(self.poly.eval(t), |acc, term| {
            let (s, c) = (term.omega * t).sin_cos();
            acc + term.sin_part.eval(t) * s + term.cos_part.eval(t) * c
        })
    }

    pub fn add(&self, other: &AtomicExpr) -> AtomicExpr {
        AtomicExpr {
            poly: self.poly.add(&other.poly),
            trig: self.trig.clone(),
        }
        .with_trig(other.trig.iter().cloned())
    }

    pub fn scale(&self, k: f64) -> AtomicExpr {
        if k == 0.0 {
            return AtomicExpr::zero();
        }
        AtomicExpr {
            poly: self.poly.scale(k),
            trig: self
                .trig
                .iter()
                .map(|t| TrigTerm {
                    omega: t.omega,
                    sin_part: t.sin_part.scale(k),
                    cos_part: t.cos_part.scale(k),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &AtomicExpr) -> AtomicExpr {
        self.add(&other.scale(-1.0))
    }

    fn mul_poly(&self, p: &Polynomial) -> AtomicExpr {
        AtomicExpr {
            poly: self.poly.mul(p),
            trig: Vec::new(),
        }
        .with_trig(self.trig.iter().map(|t| TrigTerm {
            omega: t.omega,
            sin_part: t.sin_part.mul(p),
            cos_part: t.cos_part.mul(p),
        }))
    }

    /// Pointwise product. Two sinusoidal factors multiply only when each side
    /// carries the same single frequency; anything else leaves the class.
    pub fn mul(&self, other: &AtomicExpr) -> Result<AtomicExpr> {
        let mut out = self.mul_poly(&other.poly).add(&other.mul_poly(&self.poly));
        out = out.sub(&AtomicExpr::poly(self.poly.mul(&other.poly)));
        match (self.trig.as_slice(), other.trig.as_slice()) {
            ([], _) | (_, []) => Ok(out),
            ([a], [b]) if same_point(a.omega, b.omega) => {
                // (p s + q c)(p' s + q' c) with s² = (1 - C)/2, c² = (1 + C)/2, sc = S/2
                let pp = a.sin_part.mul(&b.sin_part);
                let qq = a.cos_part.mul(&b.cos_part);
                let cross = a.sin_part.mul(&b.cos_part).add(&a.cos_part.mul(&b.sin_part));
                let mut prod = AtomicExpr::poly(pp.add(&qq).scale(0.5));
                prod.push_trig(TrigTerm {
                    omega: 2.0 * a.omega,
                    sin_part: cross.scale(0.5),
                    cos_part: qq.sub(&pp).scale(0.5),
                });
                Ok(out.add(&prod))
            }
            _ => Err(Error::ExprClassOverflow(format!(
                "product of sinusoids ({self}) · ({other}) needs more than one frequency"
            ))),
        }
    }

    pub fn powi(&self, m: usize) -> Result<AtomicExpr> {
        (0..m).try_fold(AtomicExpr::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `t ↦ self(slope·t + intercept)`.
    pub fn compose_affine(&self, slope: f64, intercept: f64) -> AtomicExpr {
        if slope == 0.0 {
            return AtomicExpr::constant(self.eval(intercept));
        }
        let inner = Polynomial::new(vec![intercept, slope]);
        let mut out = AtomicExpr::poly(self.poly.compose(&inner));
        for term in &self.trig {
            let (sk, ck) = (term.omega * intercept).sin_cos();
            let (sk, ck) = (snap_unit(sk), snap_unit(ck));
            let p = term.sin_part.compose(&inner);
            let q = term.cos_part.compose(&inner);
            let freq = term.omega * slope;
            let sign = freq.signum();
            out.push_trig(TrigTerm {
                omega: freq.abs(),
                sin_part: p.scale(ck).sub(&q.scale(sk)).scale(sign),
                cos_part: p.scale(sk).add(&q.scale(ck)),
            });
        }
        out
    }

    /// `F ∘ self`. Sinusoids only survive affine `F`.
    pub fn poly_compose(&self, f: &Polynomial) -> Result<AtomicExpr> {
        if !self.has_trig() {
            return Ok(AtomicExpr::poly(f.compose(&self.poly)));
        }
        match f.degree() {
            None => Ok(AtomicExpr::zero()),
            Some(0) | Some(1) => Ok(self.scale(f.coeff(1)).add(&AtomicExpr::constant(f.coeff(0)))),
            Some(d) => Err(Error::ExprClassOverflow(format!(
                "degree-{d} polynomial of a sinusoidal expression ({self})"
            ))),
        }
    }
}

impl fmt::Display for AtomicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |p: &Polynomial| p.to_string().replace('z', "t");
        let mut parts = Vec::new();
        if !self.poly.is_zero() || self.trig.is_empty() {
            parts.push(poly(&self.poly));
        }
        for term in &self.trig {
            for (p, name) in [(&term.sin_part, "sin"), (&term.cos_part, "cos")] {
                if p.is_zero() {
                    continue;
                }
                let arg = format!("{name}({}t)", term.omega);
                if *p == Polynomial::constant(1.0) {
                    parts.push(arg);
                } else {
                    parts.push(format!("({})·{arg}", poly(p)));
                }
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}
