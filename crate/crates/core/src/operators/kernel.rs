use std::fmt;

use crate::error::Result;
use crate::funcalg::{IntervalSet, PiecewiseExpr};
use crate::operators::affine::AffineMap;

/// The operator `x ↦ w(t)·x(υ(t))`. Every supported class is one of these.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub weight: PiecewiseExpr,
    pub map: AffineMap,
}

impl Kernel {
    pub fn new(weight: PiecewiseExpr, map: AffineMap) -> Self {
        Kernel { weight, map }
    }

    pub fn identity() -> Self {
        Kernel::new(PiecewiseExpr::constant(1.0), AffineMap::identity())
    }

    /// `self ∘ inner`: apply `inner` first.
    ///
    /// `(K₁K₂x)(t) = w₁(t)·w₂(υ₁(t))·x(υ₂(υ₁(t)))`.
    pub fn compose(&self, inner: &Kernel) -> Result<Kernel> {
        let pulled = inner.weight.compose_affine(&self.map);
        Ok(Kernel::new(self.weight.mul(&pulled)?, inner.map.after(&self.map)))
    }

    pub fn power(&self, m: usize) -> Result<Kernel> {
        (0..m).try_fold(Kernel::identity(), |acc, _| acc.compose(self))
    }

    pub fn scale(&self, k: f64) -> Kernel {
        Kernel::new(self.weight.scale(k), self.map)
    }

    pub fn apply(&self, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        let w = self.weight.eval(t);
        if w == 0.0 {
            0.0
        } else {
            w * x(self.map.apply(t))
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·x({})", self.weight, self.map)
    }
}

/// A finite sum of kernels with pairwise distinct maps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelSum {
    terms: Vec<Kernel>,
}

impl KernelSum {
    pub fn zero() -> Self {
        KernelSum::default()
    }

    pub fn terms(&self) -> &[Kernel] {
        &self.terms
    }

    /// Adds a kernel, merging it into the term with the same map if any.
    pub fn push(&mut self, k: Kernel) {
        if k.weight.is_zero() {
            return;
        }
        match self.terms.iter_mut().find(|t| t.map.approx_eq(&k.map)) {
            Some(t) => t.weight = t.weight.add(&k.weight),
            None => self.terms.push(k),
        }
        self.terms.retain(|t| !t.weight.is_zero());
    }

    pub fn sub(&self, other: &KernelSum) -> KernelSum {
        let mut out = self.clone();
        for k in &other.terms {
            out.push(k.scale(-1.0));
        }
        out
    }

    pub fn apply(&self, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        self.terms.iter().map(|k| k.apply(x, t)).sum()
    }
}

impl FromIterator<Kernel> for KernelSum {
    fn from_iter<I: IntoIterator<Item = Kernel>>(iter: I) -> Self {
        let mut s = KernelSum::zero();
        for k in iter {
            s.push(k);
        }
        s
    }
}

/// Result of comparing two kernel sums on a window.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelComparison {
    /// Every weight of the difference vanishes almost everywhere.
    Equal,
    /// The difference keeps a term with this map and a weight that is nonzero
    /// on `support` (positive measure).
    Differ { map: AffineMap, support: IntervalSet },
}

/// Decides `lhs = rhs` as operators on functions over `window`.
///
/// Distinct affine maps agree at one point at most, so `Σ w_k x(υ_k)` vanishes
/// for every `x` exactly when each grouped weight vanishes almost everywhere.
pub fn compare_kernel_sums(lhs: &KernelSum, rhs: &KernelSum, window: &IntervalSet) -> KernelComparison {
    let diff = lhs.sub(rhs);
    for term in diff.terms() {
        let support = term.weight.support(window);
        if !support.is_null() {
            return KernelComparison::Differ { map: term.map, support };
        }
    }
    KernelComparison::Equal
}
