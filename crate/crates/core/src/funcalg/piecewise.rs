use std::fmt;

use crate::error::{Error, Result};
use crate::funcalg::atomic::AtomicExpr;
use crate::funcalg::interval::{same_point, IntervalSet};
use crate::operators::{AffineMap, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub domain: IntervalSet,
    pub expr: AtomicExpr,
}

/// A function that equals `expr` on each piece domain and zero elsewhere.
///
/// Piece domains intersect pairwise in null sets at most. Where two domains
/// share an endpoint the first piece wins on evaluation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewiseExpr {
    pieces: Vec<Piece>,
}

impl PiecewiseExpr {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        for (i, p) in pieces.iter().enumerate() {
            for q in &pieces[i + 1..] {
                let common = p.domain.intersect(&q.domain);
                if !common.is_null() {
                    return Err(Error::InvalidExpr(format!(
                        "piece domains {} and {} overlap on {common}",
                        p.domain, q.domain
                    )));
                }
            }
        }
        Ok(Self::from_pieces_unchecked(pieces))
    }

    fn from_pieces_unchecked(pieces: Vec<Piece>) -> Self {
        PiecewiseExpr {
            pieces: pieces
                .into_iter()
                .filter(|p| !p.domain.is_empty() && !p.expr.is_zero())
                .collect(),
        }
        .merged()
    }

    pub fn zero() -> Self {
        PiecewiseExpr::default()
    }

    /// `expr` on `domain`, zero elsewhere.
    pub fn on(domain: IntervalSet, expr: AtomicExpr) -> Self {
        Self::from_pieces_unchecked(vec![Piece { domain, expr }])
    }

    /// `expr` on the whole real line.
    pub fn global(expr: AtomicExpr) -> Self {
        Self::on(IntervalSet::real_line(), expr)
    }

    pub fn constant(c: f64) -> Self {
        Self::global(AtomicExpr::constant(c))
    }

    pub fn indicator(domain: IntervalSet) -> Self {
        Self::on(domain, AtomicExpr::constant(1.0))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn has_trig(&self) -> bool {
        self.pieces.iter().any(|p| p.expr.has_trig())
    }

    /// Union of all piece domains.
    pub fn domain(&self) -> IntervalSet {
        self.pieces
            .iter()
            .fold(IntervalSet::empty(), |acc, p| acc.union(&p.domain))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.domain.contains(t))
            .map_or(0.0, |p| p.expr.eval(t))
    }

    /// Pieces with identical expressions are fused into one.
    fn merged(self) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for piece in self.pieces {
            match out.iter_mut().find(|q| q.expr == piece.expr) {
                Some(q) => q.domain = q.domain.union(&piece.domain),
                None => out.push(piece),
            }
        }
        PiecewiseExpr { pieces: out }
    }

    /// Combine over the common refinement. `both` sees pieces present on
    /// each side; `left`/`right` see pieces present on one side only.
    fn combine(
        &self,
        other: &PiecewiseExpr,
        both: impl Fn(&AtomicExpr, &AtomicExpr) -> Result<AtomicExpr>,
        one_sided: bool,
    ) -> Result<PiecewiseExpr> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let d = p.domain.intersect(&q.domain);
                if !d.is_empty() {
                    out.push(Piece {
                        domain: d,
                        expr: both(&p.expr, &q.expr)?,
                    });
                }
            }
        }
        if one_sided {
            let (dom_self, dom_other) = (self.domain(), other.domain());
            for p in &self.pieces {
                out.push(Piece {
                    domain: p.domain.difference(&dom_other),
                    expr: p.expr.clone(),
                });
            }
            for q in &other.pieces {
                out.push(Piece {
                    domain: q.domain.difference(&dom_self),
                    expr: q.expr.clone(),
                });
            }
        }
        Ok(Self::from_pieces_unchecked(out))
    }

    pub fn add(&self, other: &PiecewiseExpr) -> PiecewiseExpr {
        self.combine(other, |a, b| Ok(a.add(b)), true)
            .expect("addition stays in class")
    }

    pub fn sub(&self, other: &PiecewiseExpr) -> PiecewiseExpr {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> PiecewiseExpr {
        Self::from_pieces_unchecked(
            self.pieces
                .iter()
                .map(|p| Piece {
                    domain: p.domain.clone(),
                    expr: p.expr.scale(k),
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &PiecewiseExpr) -> Result<PiecewiseExpr> {
        self.combine(other, |a, b| a.mul(b), false)
    }

    pub fn powi(&self, m: usize) -> Result<PiecewiseExpr> {
        if m == 0 {
            return Ok(PiecewiseExpr::constant(1.0));
        }
        (1..m).try_fold(self.clone(), |acc, _| acc.mul(self))
    }

    /// Zero outside `set`.
    pub fn restrict(&self, set: &IntervalSet) -> PiecewiseExpr {
        Self::from_pieces_unchecked(
            self.pieces
                .iter()
                .map(|p| Piece {
                    domain: p.domain.intersect(set),
                    expr: p.expr.clone(),
                })
                .collect(),
        )
    }

    /// `t ↦ F(self(t))`, including the value `F(0)` off every piece.
    pub fn poly_compose(&self, f: &Polynomial) -> Result<PiecewiseExpr> {
        let mut out = self
            .pieces
            .iter()
            .map(|p| {
                Ok(Piece {
                    domain: p.domain.clone(),
                    expr: p.expr.poly_compose(f)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let f0 = f.eval(0.0);
        if f0 != 0.0 {
            out.push(Piece {
                domain: self.domain().complement(),
                expr: AtomicExpr::constant(f0),
            });
        }
        Ok(Self::from_pieces_unchecked(out))
    }

    /// `t ↦ self(map(t))`.
    pub fn compose_affine(&self, map: &AffineMap) -> PiecewiseExpr {
        if map.slope == 0.0 {
            return PiecewiseExpr::constant(self.eval(map.intercept));
        }
        Self::from_pieces_unchecked(
            self.pieces
                .iter()
                .map(|p| Piece {
                    domain: p.domain.preimage_affine(map.slope, map.intercept),
                    expr: p.expr.compose_affine(map.slope, map.intercept),
                })
                .collect(),
        )
    }

    /// Essential support inside `window`: piece domains whose expression is not
    /// identically zero. Zeros of nonzero pieces form a null set and are kept.
    pub fn support(&self, window: &IntervalSet) -> IntervalSet {
        self.pieces
            .iter()
            .filter(|p| !p.expr.is_zero())
            .fold(IntervalSet::empty(), |acc, p| acc.union(&p.domain.intersect(window)))
    }

    /// Finite endpoints of all piece domains, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.pieces.iter().flat_map(|p| p.domain.endpoints()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| same_point(*a, *b));
        pts
    }

    /// Whether the function is constant on some open subinterval of `window`:
    /// either a constant piece of positive measure or a positive-measure gap.
    pub fn constant_somewhere(&self, window: &IntervalSet) -> bool {
        let constant_piece = self
            .pieces
            .iter()
            .any(|p| p.expr.is_constant() && !p.domain.intersect(window).is_null());
        constant_piece || !window.difference(&self.domain()).is_null()
    }

    fn one_sided_limit(&self, t: f64, from_left: bool) -> f64 {
        self.pieces
            .iter()
            .find(|p| {
                p.domain.intervals().iter().any(|iv| {
                    if from_left {
                        iv.lo < t && (t < iv.hi || same_point(t, iv.hi))
                    } else {
                        (iv.lo < t || same_point(t, iv.lo)) && t < iv.hi
                    }
                })
            })
            .map_or(0.0, |p| p.expr.eval(t))
    }

    /// First interior breakpoint of `window` where the one-sided limits disagree.
    pub fn continuity_defect(&self, window: &IntervalSet) -> Option<(f64, f64, f64)> {
        let (lo, hi) = window.hull()?;
        self.breakpoints()
            .into_iter()
            .filter(|&p| p > lo && p < hi && window.contains(p))
            .find_map(|p| {
                let l = self.one_sided_limit(p, true);
                let r = self.one_sided_limit(p, false);
                ((l - r).abs() > 1e-9 * (1.0 + l.abs().max(r.abs()))).then_some((p, l, r))
            })
    }

    pub fn check_continuous(&self, window: &IntervalSet) -> Result<()> {
        match self.continuity_defect(window) {
            Some((at, left, right)) => Err(Error::NotContinuous { at, left, right }),
            None => Ok(()),
        }
    }
}

impl From<AtomicExpr> for PiecewiseExpr {
    fn from(expr: AtomicExpr) -> Self {
        PiecewiseExpr::global(expr)
    }
}

impl fmt::Display for PiecewiseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{} on {}", p.expr, p.domain))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}
