//! Pairs of multiplication operators on `L_p`, decided up to null sets.

use crate::error::{Error, Result};
use crate::funcalg::{IntervalSet, PiecewiseExpr};
use crate::operators::{OperatorSpec, Polynomial};

use super::verdict::{Verdict, Witness};

const RULE_MULT: &str = "multiplication pair: supp b ∩ supp(a - F(a)) null";

/// `A x = a x`, `B x = b x` on `L_p`: the relation holds iff
/// `supp b ∩ supp(a - F(a))` is null. Both relation forms coincide because
/// multiplications commute.
pub fn check_mult_mult(a: &PiecewiseExpr, b: &PiecewiseExpr, f: &Polynomial, window: &IntervalSet) -> Verdict {
    let fa = match a.poly_compose(f) {
        Ok(fa) => fa,
        Err(e) => return Verdict::unknown(RULE_MULT, e.to_string()),
    };
    let diff = a.sub(&fa);
    let supp_b = b.support(window);
    let supp_diff = diff.support(window);
    let omega = supp_b.intersect(&supp_diff);
    let cert = format!("supp b = {supp_b}, supp(a - F(a)) = {supp_diff}, intersection {omega}");
    if omega.is_null() {
        Verdict::holds(RULE_MULT, vec![cert, "the intersection has measure zero".into()])
    } else {
        Verdict::fails(
            RULE_MULT,
            Witness::on_set(omega.clone()),
            vec![cert, format!("measure {} > 0", omega.measure())],
        )
    }
}

struct Piecewise<'a> {
    alphas: &'a [f64],
    weight: PiecewiseExpr,
    parts: Vec<IntervalSet>,
}

fn as_piecewise(op: &OperatorSpec) -> Result<Piecewise<'_>> {
    match op {
        OperatorSpec::PiecewiseMult { alphas, weight, parts } => Ok(Piecewise {
            alphas,
            weight: weight.clone(),
            parts: parts.clone(),
        }),
        OperatorSpec::Mult { weight } => Ok(Piecewise {
            alphas: &[1.0],
            weight: weight.clone(),
            parts: vec![IntervalSet::real_line()],
        }),
        other => Err(Error::InvalidOperator(format!(
            "expected a multiplication operator, got {}",
            other.class_name()
        ))),
    }
}

fn same_partition(g: &[IntervalSet], h: &[IntervalSet], window: &IntervalSet) -> bool {
    g.len() == h.len()
        && g.iter().zip(h).all(|(x, y)| {
            let (x, y) = (x.intersect(window), y.intersect(window));
            x.difference(&y).is_null() && y.difference(&x).is_null()
        })
}

/// `A x = Σ α_i a I_{G_i} x`, `B x = Σ β_j b I_{H_j} x` on `L_p`.
///
/// The identity is split over the refined cells `G_i ∩ H_j` and
/// `H_j \ ∪G_i`. On `G_i ∩ H_j` it reads `β_j b (α_i a - F₁(α_i a)) = 0`, and
/// off every `G_i` the operator `F₁(A)` is `δ₀` so it reads `β_j b δ₀ = 0`.
pub fn check_piecewise_pair(
    a_op: &OperatorSpec,
    b_op: &OperatorSpec,
    f1: &Polynomial,
    window: &IntervalSet,
) -> Result<Verdict> {
    let a = as_piecewise(a_op)?;
    let b = as_piecewise(b_op)?;

    let rule = if f1.is_constant() {
        "piecewise pair, constant polynomial"
    } else if b.parts.len() == 1
        && b.alphas[0] != 0.0
        && a.parts
            .iter()
            .any(|g| same_partition(std::slice::from_ref(g), &b.parts, window))
    {
        "piecewise pair, B supported on one cell of A"
    } else if same_partition(&a.parts, &b.parts, window) {
        "piecewise pair, shared partition"
    } else {
        "piecewise pair, refined partition"
    };

    let supp_b = b.weight.support(window);
    let union_g = a.parts.iter().fold(IntervalSet::empty(), |acc, g| acc.union(g));
    let delta0 = f1.coeff(0);

    let mut certificate = Vec::new();
    let mut offending = IntervalSet::empty();
    for (j, (&beta, h)) in b.alphas.iter().zip(&b.parts).enumerate() {
        let h = h.intersect(window);
        if beta == 0.0 || h.is_null() {
            continue;
        }
        for (i, (&alpha, g)) in a.alphas.iter().zip(&a.parts).enumerate() {
            let cell = g.intersect(&h);
            if cell.is_null() {
                continue;
            }
            let scaled = a.weight.scale(alpha);
            let image = match scaled.poly_compose(f1) {
                Ok(e) => e,
                Err(e) => return Ok(Verdict::unknown(rule, e.to_string())),
            };
            let bad = scaled.sub(&image).support(window).intersect(&supp_b).intersect(&cell);
            certificate.push(format!(
                "G{} ∩ H{} = {cell}: supp b ∩ supp(α{} a - F(α{} a)) ∩ cell = {bad}",
                i + 1,
                j + 1,
                i + 1,
                i + 1
            ));
            if !bad.is_null() {
                offending = offending.union(&bad);
            }
        }
        let rest = h.difference(&union_g);
        if !rest.is_null() {
            let bad = if delta0 == 0.0 {
                IntervalSet::empty()
            } else {
                rest.intersect(&supp_b)
            };
            certificate.push(format!(
                "H{} \\ ∪G = {rest}: A vanishes, F(A) = {delta0}, offending part {bad}",
                j + 1
            ));
            if !bad.is_null() {
                offending = offending.union(&bad);
            }
        }
    }

    if offending.is_null() {
        if certificate.is_empty() {
            certificate.push("B vanishes on the window, both sides are zero".into());
        }
        certificate.push("every cell identity holds up to a null set".into());
        Ok(Verdict::holds(rule, certificate))
    } else {
        certificate.push(format!("identity fails on {offending}"));
        Ok(Verdict::fails(rule, Witness::on_set(offending), certificate))
    }
}
