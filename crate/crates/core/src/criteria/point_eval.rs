//! Pairs made of a multiplication and a point evaluation on `C[α,β]`.
//!
//! Supports are computed up to null sets. Both functions are validated as
//! continuous, so a null intersection of supports is empty: a continuous
//! function that is nonzero at a point is nonzero on a neighbourhood of it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalg::{IntervalSet, PiecewiseExpr};
use crate::operators::Polynomial;

use super::verdict::{Verdict, Witness};
use super::{show, SCALAR_EPS};

fn is_zero(x: f64) -> bool {
    x.abs() <= SCALAR_EPS
}

fn snap(x: f64) -> f64 {
    if is_zero(x) {
        0.0
    } else {
        x
    }
}

/// `supp f ∩ supp g` on the window. Null means empty for continuous inputs.
fn omega(f: &PiecewiseExpr, g: &PiecewiseExpr, window: &IntervalSet) -> IntervalSet {
    f.support(window).intersect(&g.support(window))
}

fn emptiness_line(name: &str, set: &IntervalSet) -> String {
    if set.is_null() {
        format!("{name} = {set} has measure zero, hence is empty by continuity")
    } else {
        format!("{name} = {set} has positive measure")
    }
}

fn require_point(gamma: f64, window: &IntervalSet) -> Result<()> {
    if window.contains(gamma) {
        Ok(())
    } else {
        Err(Error::WindowTooSmall(format!(
            "evaluation point {gamma} lies outside the window {window}"
        )))
    }
}

/// The five mutually exclusive situations for `A x = a x(γ)`, `B x = b x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointEvalCase {
    /// `a(γ) ≠ 0`, `b(γ) ≠ 0`, `δ₀ = 0`.
    BothNonzero,
    /// `a(γ) = 0`, `b(γ) ≠ 0`.
    AVanishes,
    /// `a(γ) ≠ 0`, `b(γ) = 0`, `δ₀ = 0`.
    BVanishes,
    /// `a(γ) = b(γ) = 0`.
    BothVanish,
    /// `δ₀ ≠ 0` and `a(γ) ≠ 0`.
    ConstantTerm,
}

impl PointEvalCase {
    pub fn classify(a_gamma: f64, b_gamma: f64, delta0: f64) -> Self {
        match (is_zero(a_gamma), is_zero(b_gamma), is_zero(delta0)) {
            (true, false, _) => PointEvalCase::AVanishes,
            (true, true, _) => PointEvalCase::BothVanish,
            (false, _, false) => PointEvalCase::ConstantTerm,
            (false, false, true) => PointEvalCase::BothNonzero,
            (false, true, true) => PointEvalCase::BVanishes,
        }
    }

    fn rule(self) -> &'static str {
        match self {
            PointEvalCase::BothNonzero => "point evaluation, a(γ) ≠ 0 and b(γ) ≠ 0",
            PointEvalCase::AVanishes => "point evaluation, a(γ) = 0",
            PointEvalCase::BVanishes => "point evaluation, b(γ) = 0",
            PointEvalCase::BothVanish => "point evaluation, a(γ) = b(γ) = 0",
            PointEvalCase::ConstantTerm => "point evaluation, δ₀ ≠ 0",
        }
    }
}

/// `k₁ = Σ_{j≥1} δ_j a(γ)^{j-1}`.
pub fn k1(f: &Polynomial, a_gamma: f64) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, d)| d * a_gamma.powi(j as i32 - 1))
        .sum()
}

/// The undivided criterion: the relation holds iff `δ₀ = 0` or `b ≡ 0`, and
/// `supp a ∩ supp(b(γ) - k₁ b)` is empty. The case analysis refines this.
pub fn pointeval_mult_rule(
    a: &PiecewiseExpr,
    gamma: f64,
    b: &PiecewiseExpr,
    f: &Polynomial,
    window: &IntervalSet,
) -> bool {
    let b_zero = b.support(window).is_null();
    let k = snap(k1(f, a.eval(gamma)));
    let rest = PiecewiseExpr::constant(snap(b.eval(gamma))).sub(&b.scale(k));
    (is_zero(f.coeff(0)) || b_zero) && omega(a, &rest, window).is_null()
}

/// `A x = a(t) x(γ)`, `B x = b(t) x(t)` on `C[α,β]`, relation `AB = BF(A)`.
pub fn check_pointeval_mult(
    a: &PiecewiseExpr,
    gamma: f64,
    b: &PiecewiseExpr,
    f: &Polynomial,
    window: &IntervalSet,
) -> Result<Verdict> {
    require_point(gamma, window)?;
    a.check_continuous(window)?;
    b.check_continuous(window)?;

    let (ag, bg) = (a.eval(gamma), b.eval(gamma));
    let (d0, d1) = (f.coeff(0), f.coeff(1));
    let k = k1(f, ag);
    let case = PointEvalCase::classify(ag, bg, d0);
    let rule = case.rule();
    let supp_b = b.support(window);
    let b_zero = supp_b.is_null();
    let mut cert = vec![format!(
        "a(γ) = {}, b(γ) = {}, δ₀ = {d0}, δ₁ = {d1}, k₁ = {}",
        show(ag),
        show(bg),
        show(k)
    )];

    let against = |g: &PiecewiseExpr, label: &str, cert: &mut Vec<String>| {
        let set = omega(a, g, window);
        cert.push(emptiness_line(label, &set));
        set
    };
    let holds = |cert: Vec<String>| Ok(Verdict::holds(rule, cert));
    let fails_on = |set: IntervalSet, cert: Vec<String>| {
        let set = if set.is_null() { IntervalSet::point(gamma) } else { set };
        Ok(Verdict::fails(rule, Witness::on_set(set), cert))
    };

    match case {
        PointEvalCase::BothNonzero => {
            let rest = PiecewiseExpr::constant(bg).sub(&b.scale(k));
            let set = against(&rest, "supp a ∩ supp(b(γ) - k₁ b)", &mut cert);
            if !b.constant_somewhere(window) {
                cert.push("b is not constant on any open subinterval".into());
                return fails_on(set, cert);
            }
            if set.is_null() {
                holds(cert)
            } else {
                fails_on(set, cert)
            }
        }
        PointEvalCase::AVanishes => {
            if !is_zero(d0) {
                cert.push("δ₀ ≠ 0 while b(γ) ≠ 0: at t = γ the left side is 0".into());
                let w = Witness::Function {
                    x: "1".into(),
                    t: gamma,
                    lhs: 0.0,
                    rhs: d0 * bg,
                };
                return Ok(Verdict::fails(rule, w, cert));
            }
            let rest = PiecewiseExpr::constant(bg).sub(&b.scale(d1));
            let set = against(&rest, "supp a ∩ supp(b(γ) - δ₁ b)", &mut cert);
            if set.is_null() {
                holds(cert)
            } else {
                fails_on(set, cert)
            }
        }
        PointEvalCase::BVanishes => {
            if is_zero(k) {
                cert.push("k₁ = 0".into());
                return holds(cert);
            }
            let set = against(b, "supp a ∩ supp b", &mut cert);
            if set.is_null() {
                holds(cert)
            } else {
                fails_on(set, cert)
            }
        }
        PointEvalCase::BothVanish => {
            if !is_zero(d0) && !b_zero {
                cert.push(format!("δ₀ ≠ 0 and b is nonzero on {supp_b}"));
                return fails_on(supp_b, cert);
            }
            if is_zero(d1) {
                cert.push("δ₀ = 0 and δ₁ = 0".into());
                return holds(cert);
            }
            let set = against(b, "supp a ∩ supp b", &mut cert);
            if set.is_null() {
                holds(cert)
            } else {
                fails_on(set, cert)
            }
        }
        PointEvalCase::ConstantTerm => {
            if b_zero {
                cert.push("b vanishes on the window, both sides are zero".into());
                return holds(cert);
            }
            cert.push(format!(
                "δ₀ b(t) x(t) cannot be matched by multiples of x(γ) where b ≠ 0, i.e. on {supp_b}"
            ));
            fails_on(supp_b, cert)
        }
    }
}

/// `A x = a(t) x(t)`, `B x = b(t) x(γ)` on `C[α,β]`, relation `AB = BF(A)`:
/// holds iff `supp(a - F(a(γ))) ∩ supp b` is empty.
pub fn check_mult_pointeval(
    a: &PiecewiseExpr,
    b: &PiecewiseExpr,
    gamma: f64,
    f: &Polynomial,
    window: &IntervalSet,
) -> Result<Verdict> {
    const RULE: &str = "multiplication and point evaluation: supp(a - F(a(γ))) ∩ supp b empty";
    require_point(gamma, window)?;
    a.check_continuous(window)?;
    b.check_continuous(window)?;
    let c = f.eval(a.eval(gamma));
    let shifted = a.sub(&PiecewiseExpr::constant(c));
    let set = omega(&shifted, b, window);
    let cert = vec![
        format!("F(a(γ)) = {}", show(c)),
        emptiness_line("supp(a - F(a(γ))) ∩ supp b", &set),
    ];
    if set.is_null() {
        Ok(Verdict::holds(RULE, cert))
    } else {
        Ok(Verdict::fails(RULE, Witness::on_set(set), cert))
    }
}
