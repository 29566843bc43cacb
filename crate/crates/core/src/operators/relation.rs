use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalg::interval::same_point;
use crate::operators::affine::AffineMap;
use crate::operators::kernel::{Kernel, KernelSum};
use crate::operators::operator::OperatorSpec;
use crate::operators::polynomial::Polynomial;

/// Which of the two covariance relations is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationForm {
    #[serde(rename = "AB=BF(A)")]
    AbBfa,
    #[serde(rename = "BA=F(A)B")]
    BaFab,
}

impl fmt::Display for RelationForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationForm::AbBfa => write!(f, "AB=BF(A)"),
            RelationForm::BaFab => write!(f, "BA=F(A)B"),
        }
    }
}

impl FromStr for RelationForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "AB=BF(A)" => Ok(RelationForm::AbBfa),
            "BA=F(A)B" => Ok(RelationForm::BaFab),
            _ => Err(Error::Parse(format!(
                "unknown relation form `{s}` (expected AB=BF(A) or BA=F(A)B)"
            ))),
        }
    }
}

/// `base^exponent`; exponent zero is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub base: OperatorSpec,
    pub exponent: usize,
}

/// `coeff · F₁ F₂ … F_k`, with `F_k` applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub factors: Vec<Factor>,
}

/// A linear combination of operator products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpr {
    pub terms: Vec<Term>,
}

fn apply_chain(stages: &[&OperatorSpec], x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    match stages.split_first() {
        None => x(t),
        Some((op, rest)) => op.apply(&|s| apply_chain(rest, x, s), t),
    }
}

impl Term {
    /// The operators in application order from the outside in, with powers
    /// expanded into repeated factors.
    fn stages(&self) -> Vec<&OperatorSpec> {
        self.factors
            .iter()
            .flat_map(|f| std::iter::repeat_n(&f.base, f.exponent))
            .collect()
    }

    /// Numeric application by literal nesting of each class formula.
    pub fn apply(&self, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        self.coeff * apply_chain(&self.stages(), x, t)
    }

    /// Closed-form kernel, using each factor's closed-form power.
    pub fn to_kernel(&self) -> Result<Kernel> {
        let mut k = Kernel::identity();
        for f in &self.factors {
            if f.exponent == 0 {
                continue;
            }
            k = k.compose(&f.base.power(f.exponent)?.kernel())?;
        }
        Ok(k.scale(self.coeff))
    }

    /// Points `t` where some stage reads a coefficient at one of its jumps,
    /// found by pulling each stage's breakpoints back through the maps applied
    /// before it. Stages behind a constant map do not depend on `t`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut reach = AffineMap::identity();
        for op in self.stages() {
            if reach.is_constant() {
                break;
            }
            for p in op.breakpoints() {
                out.push((p - reach.intercept) / reach.slope);
            }
            if let OperatorSpec::PointEval { gamma, .. } = op {
                out.push((gamma - reach.intercept) / reach.slope);
            }
            reach = op.map().after(&reach);
        }
        out
    }
}

impl OperatorExpr {
    pub fn apply(&self, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        self.terms.iter().map(|term| term.apply(x, t)).sum()
    }

    pub fn to_kernels(&self) -> Result<KernelSum> {
        let mut sum = KernelSum::zero();
        for term in &self.terms {
            sum.push(term.to_kernel()?);
        }
        Ok(sum)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.terms.iter().flat_map(Term::breakpoints).collect();
        pts.retain(|p| p.is_finite());
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| same_point(*a, *b));
        pts
    }
}

/// Both sides of the relation. `F(A)` is expanded as `Σ δ_j A^j` with an
/// explicit identity term for `δ₀`.
pub fn relation_sides(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
) -> (OperatorExpr, OperatorExpr) {
    let factor = |op: &OperatorSpec, exponent| Factor {
        base: op.clone(),
        exponent,
    };
    let lhs = match form {
        RelationForm::AbBfa => vec![factor(a, 1), factor(b, 1)],
        RelationForm::BaFab => vec![factor(b, 1), factor(a, 1)],
    };
    let rhs = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0.0)
        .map(|(j, &d)| Term {
            coeff: d,
            factors: match form {
                RelationForm::AbBfa => vec![factor(b, 1), factor(a, j)],
                RelationForm::BaFab => vec![factor(a, j), factor(b, 1)],
            },
        })
        .collect();
    (
        OperatorExpr {
            terms: vec![Term {
                coeff: 1.0,
                factors: lhs,
            }],
        },
        OperatorExpr { terms: rhs },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::{AtomicExpr, IntervalSet, PiecewiseExpr};

    fn mult(coeffs: &[f64]) -> OperatorSpec {
        OperatorSpec::Mult {
            weight: PiecewiseExpr::on("[0,2]".parse().unwrap(), AtomicExpr::from_coeffs(coeffs)),
        }
    }

    #[test]
    fn form_parsing() {
        assert_eq!("AB = BF(A)".parse::<RelationForm>().unwrap(), RelationForm::AbBfa);
        assert_eq!(
            RelationForm::BaFab.to_string().parse::<RelationForm>().unwrap(),
            RelationForm::BaFab
        );
        assert!("AB=BA".parse::<RelationForm>().is_err());
    }

    #[test]
    fn identity_polynomial_on_equal_multiplications() {
        let a = mult(&[1.0, 2.0]);
        let (lhs, rhs) = relation_sides(&a, &a, &Polynomial::identity(), RelationForm::AbBfa);
        let (kl, kr) = (lhs.to_kernels().unwrap(), rhs.to_kernels().unwrap());
        assert_eq!(kl, kr);
        let expect = PiecewiseExpr::on("[0,2]".parse().unwrap(), AtomicExpr::from_coeffs(&[1.0, 4.0, 4.0]));
        assert_eq!(kl.terms()[0].weight, expect);
        for t in [0.1, 0.7, 1.9] {
            let x = |s: f64| s.sin();
            assert!((lhs.apply(&x, t) - rhs.apply(&x, t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn middle_cell_right_side() {
        let parts: Vec<IntervalSet> = ["[0,1/3]", "(1/3,1/2)", "(1/2,1]"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let a = OperatorSpec::PiecewiseMult {
            alphas: vec![0.5, 3.0, -2.0],
            weight: PiecewiseExpr::constant(1.0),
            parts: parts.clone(),
        };
        let b = OperatorSpec::PiecewiseMult {
            alphas: vec![1.0],
            weight: PiecewiseExpr::constant(1.0),
            parts: vec![parts[1].clone()],
        };
        let (_, rhs) = relation_sides(&a, &b, &Polynomial::monomial(1.0, 3), RelationForm::AbBfa);
        let k = rhs.to_kernels().unwrap();
        assert_eq!(k.terms().len(), 1);
        assert_eq!(k.terms()[0].weight.eval(0.4), 27.0);
        assert_eq!(k.terms()[0].weight.eval(0.2), 0.0);
        assert_eq!(rhs.apply(&|_| 1.0, 0.4), 27.0);
    }

    #[test]
    fn zero_polynomial_gives_zero_side() {
        let a = mult(&[1.0]);
        let (_, rhs) = relation_sides(&a, &a, &Polynomial::zero(), RelationForm::BaFab);
        assert!(rhs.terms.is_empty());
        assert!(rhs.to_kernels().unwrap().terms().is_empty());
    }

    #[test]
    fn breakpoints_follow_the_maps() {
        let a = OperatorSpec::TranslateDilate {
            alphas: vec![1.0],
            parts: vec!["[0,1]".parse().unwrap()],
            shift: 1.0,
            scale: 1.0,
        };
        let b = OperatorSpec::dilation(1.0, 0.5);
        let (lhs, _) = relation_sides(&a, &b, &Polynomial::identity(), RelationForm::BaFab);
        // B reads (Ax)(t/2): A's jumps at 0 and 1 appear at 0 and 2
        assert_eq!(lhs.breakpoints(), vec![0.0, 2.0]);
    }
}
