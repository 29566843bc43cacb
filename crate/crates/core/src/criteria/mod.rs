//! Symbolic deciders for `AB = BF(A)` and `BA = F(A)B`, and the fixed-point solver.

pub mod composition;
pub mod fixpoint;
pub mod multiplication;
pub mod point_eval;
pub mod translation;
pub mod verdict;

pub use composition::check_composition_pair;
pub use fixpoint::{fixed_points, FixedPointSet, DEFAULT_FIXPOINT_TOL};
pub use multiplication::{check_mult_mult, check_piecewise_pair};
pub use point_eval::{check_mult_pointeval, check_pointeval_mult, k1, pointeval_mult_rule, PointEvalCase};
pub use translation::check_translate_dilate;
pub use verdict::{Status, Verdict, Witness};

use crate::error::{Error, Result};
use crate::funcalg::IntervalSet;
use crate::operators::{compare_kernel_sums, relation_sides, KernelComparison, OperatorSpec, Polynomial, RelationForm};

/// Scalars at most this large in magnitude count as zero, e.g. `sin(π)`.
pub const SCALAR_EPS: f64 = 1e-12;

/// A scalar for certificates; rounding noise shows as such.
pub(crate) fn show(x: f64) -> String {
    if x != 0.0 && x.abs() <= SCALAR_EPS {
        format!("{x:.1e} ≈ 0")
    } else {
        format!("{x}")
    }
}

/// Whether the operator only makes sense on continuous functions over the
/// window, i.e. reads `x` at points other than `t` itself inside `[α, β]`.
pub fn is_continuous_class(op: &OperatorSpec) -> bool {
    matches!(
        op,
        OperatorSpec::WeightedComposition { .. } | OperatorSpec::PointEval { .. }
    )
}

/// Operators on `C[α,β]` must read `x` inside the window. Operators on
/// `L_p(ℝ)` read it anywhere on the line, so they impose nothing.
pub fn check_window(op: &OperatorSpec, window: &IntervalSet) -> Result<()> {
    let Some((lo, hi)) = window.hull() else {
        return Err(Error::WindowTooSmall("empty window".into()));
    };
    match op {
        OperatorSpec::PointEval { gamma, .. } if !window.contains(*gamma) => Err(Error::WindowTooSmall(format!(
            "evaluation point {gamma} lies outside the window {window}"
        ))),
        OperatorSpec::WeightedComposition { map, .. } => {
            let slack = 1e-12 * 1f64.max(lo.abs()).max(hi.abs());
            for t in [lo, hi] {
                let s = map.apply(t);
                if s < lo - slack || s > hi + slack {
                    return Err(Error::WindowTooSmall(format!(
                        "map {map} sends {t} to {s}, outside the window {window}"
                    )));
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// The window must be one bounded interval of positive length.
pub fn validate_window(window: &IntervalSet) -> Result<(f64, f64)> {
    match window.intervals() {
        [iv] if iv.lo.is_finite() && iv.hi.is_finite() && iv.lo < iv.hi => Ok((iv.lo, iv.hi)),
        _ => Err(Error::InvalidInterval(format!(
            "window must be a single bounded interval of positive length, got {window}"
        ))),
    }
}

const RULE_GENERIC: &str = "kernel comparison";

/// Fallback for class combinations without a dedicated criterion: both sides
/// are reduced to sums `Σ w_k(t) x(υ_k(t))` and compared map by map.
pub fn check_kernels(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
    window: &IntervalSet,
) -> Verdict {
    let (lhs, rhs) = relation_sides(a, b, f, form);
    let sides = lhs.to_kernels().and_then(|l| Ok((l, rhs.to_kernels()?)));
    let (kl, kr) = match sides {
        Ok(s) => s,
        Err(e) => return Verdict::unknown(RULE_GENERIC, e.to_string()),
    };
    match compare_kernel_sums(&kl, &kr, window) {
        KernelComparison::Equal => Verdict::holds(
            RULE_GENERIC,
            vec![format!(
                "both sides reduce to the same weighted compositions ({} distinct maps)",
                kl.terms().len().max(kr.terms().len())
            )],
        ),
        KernelComparison::Differ { map, support } => Verdict::fails(
            RULE_GENERIC,
            Witness::on_set(support.clone()),
            vec![format!("the terms reading x({map}) differ on {support}")],
        ),
    }
}

/// Picks the criterion matching the operator classes and relation form.
pub fn decide(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
    window: &IntervalSet,
) -> Result<Verdict> {
    validate_window(window)?;
    a.validate()?;
    b.validate()?;
    check_window(a, window)?;
    check_window(b, window)?;
    use OperatorSpec as O;
    match (a, b, form) {
        (O::Mult { weight: wa }, O::Mult { weight: wb }, _) => Ok(check_mult_mult(wa, wb, f, window)),
        (O::Mult { .. } | O::PiecewiseMult { .. }, O::Mult { .. } | O::PiecewiseMult { .. }, _) => {
            check_piecewise_pair(a, b, f, window)
        }
        (O::TranslateDilate { .. }, O::TranslateDilate { .. }, _) => check_translate_dilate(a, b, f, form, window),
        (O::WeightedComposition { .. }, O::WeightedComposition { .. }, _) => {
            check_composition_pair(a, b, f, form, window)
        }
        (O::PointEval { weight: wa, gamma }, O::Mult { weight: wb }, RelationForm::AbBfa) => {
            check_pointeval_mult(wa, *gamma, wb, f, window)
        }
        (O::Mult { weight: wa }, O::PointEval { weight: wb, gamma }, RelationForm::AbBfa) => {
            check_mult_pointeval(wa, wb, *gamma, f, window)
        }
        _ => Ok(check_kernels(a, b, f, form, window)),
    }
}
