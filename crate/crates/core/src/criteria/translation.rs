//! Translation/dilation pairs on `L_p(ℝ)`, decided by affine conjugacy.

use crate::error::{Error, Result};
use crate::funcalg::IntervalSet;
use crate::operators::{AffineMap, OperatorSpec, Polynomial, RelationForm};

use super::verdict::{Verdict, Witness};
use super::SCALAR_EPS;

const RULE: &str = "translation/dilation conjugacy";

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= SCALAR_EPS * 1f64.max(x.abs()).max(y.abs())
}

/// The single coefficient of `c(t)·x(υ(t))` on `region`, if `c` is constant
/// there. `None` means the partition really varies where it is read.
fn uniform_coefficient(op: &OperatorSpec, region: &IntervalSet) -> Option<f64> {
    let OperatorSpec::TranslateDilate { alphas, parts, .. } = op else {
        return None;
    };
    if parts.is_empty() {
        return Some(alphas[0]);
    }
    let first = alphas[0];
    if !alphas.iter().all(|&a| close(a, first)) {
        return None;
    }
    let cover = parts.iter().fold(IntervalSet::empty(), |acc, g| acc.union(g));
    region.difference(&cover).is_null().then_some(first)
}

fn images(window: &IntervalSet, maps: &[AffineMap]) -> IntervalSet {
    maps.iter().fold(IntervalSet::empty(), |acc, m| {
        let img = if m.is_constant() {
            IntervalSet::point(m.intercept)
        } else {
            window.image_affine(m.slope, m.intercept)
        };
        acc.union(&img)
    })
}

/// `A x = α x(υ(t))` (translation), `B x = β x(σ(t))` (dilation), `F = δ z^m`.
///
/// For `BA = F(A)B` the two sides are `αβ x(υ(σ(t)))` and
/// `δ α^m β x(σ(υ^m(t)))`; for `AB = BF(A)` they are `αβ x(σ(υ(t)))` and
/// `δ α^m β x(υ^m(σ(t)))`. Equality for every `x` means the coefficients
/// agree and, unless both vanish, so do the maps.
pub fn check_translate_dilate(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
    window: &IntervalSet,
) -> Result<Verdict> {
    for op in [a, b] {
        if !matches!(op, OperatorSpec::TranslateDilate { .. }) {
            return Err(Error::InvalidOperator(format!(
                "translation/dilation checker got a {} operator",
                op.class_name()
            )));
        }
    }
    let Some((delta, m)) = f.as_monomial() else {
        return Ok(Verdict::unknown(RULE, format!("F = {f} is not a monomial δz^m")));
    };
    let (u, s) = (a.map(), b.map());
    let um = u.iterate(m as u32);
    let id = AffineMap::identity();
    let a_reads: Vec<AffineMap> = (0..m as u32).map(|k| u.iterate(k)).collect();
    let (a_region, b_region, lhs_map, rhs_map) = match form {
        RelationForm::BaFab => {
            let mut reads = vec![s];
            reads.extend(a_reads.iter().copied());
            (
                images(window, &reads),
                images(window, &[id, um]),
                u.after(&s),
                s.after(&um),
            )
        }
        RelationForm::AbBfa => {
            let mut reads = vec![id];
            reads.extend(a_reads.iter().map(|r| r.after(&s)));
            (
                images(window, &reads),
                images(window, &[u, id]),
                s.after(&u),
                um.after(&s),
            )
        }
    };
    let (Some(alpha), Some(beta)) = (uniform_coefficient(a, &a_region), uniform_coefficient(b, &b_region)) else {
        return Ok(Verdict::unknown(
            RULE,
            "the coefficient partition is not uniform where it is read; the partitioned identity is only decided for a single coefficient",
        ));
    };

    let lhs_c = alpha * beta;
    let rhs_c = delta * alpha.powi(m as i32) * beta;
    let mut cert = vec![format!(
        "left side {lhs_c}·x({lhs_map}), right side {rhs_c}·x({rhs_map})"
    )];
    let lhs_zero = lhs_c.abs() <= SCALAR_EPS;
    let rhs_zero = rhs_c.abs() <= SCALAR_EPS;
    if lhs_zero && rhs_zero {
        cert.push("both coefficients vanish".into());
        return Ok(Verdict::holds(RULE, cert));
    }
    let maps_agree = lhs_map.approx_eq(&rhs_map);
    if maps_agree && close(lhs_c, rhs_c) {
        cert.push("maps agree and δα^(m-1) = 1".into());
        return Ok(Verdict::holds(RULE, cert));
    }
    if !maps_agree {
        cert.push(format!("maps differ: {lhs_map} vs {rhs_map}"));
    } else {
        cert.push(format!("coefficients differ: {lhs_c} vs {rhs_c}"));
    }

    let (lo, hi) = window.hull().unwrap_or((0.0, 1.0));
    let mut points = Vec::new();
    if window.contains(0.0) {
        points.push(0.0);
    }
    points.extend([0.5 * (lo + hi), lo + 0.25 * (hi - lo), hi]);
    type Trial = (&'static str, fn(f64) -> f64);
    let trials: [Trial; 2] = [("1", |_| 1.0), ("t", |t| t)];
    let mut best: Option<Witness> = None;
    let mut best_gap = -1.0;
    for (name, x) in trials {
        for &t in &points {
            let l = lhs_c * x(lhs_map.apply(t));
            let r = rhs_c * x(rhs_map.apply(t));
            // prefer the simplest function that separates the sides
            let gap = (l - r).abs() / 1f64.max(l.abs()).max(r.abs());
            if gap > best_gap + SCALAR_EPS {
                best_gap = gap;
                best = Some(Witness::Function {
                    x: name.into(),
                    t,
                    lhs: l,
                    rhs: r,
                });
            }
        }
        if best_gap > SCALAR_EPS {
            break;
        }
    }
    Ok(Verdict::fails(RULE, best.expect("at least one trial point"), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Status;

    fn window() -> IntervalSet {
        "[-8,8]".parse().unwrap()
    }

    #[test]
    fn wavelet_pair_holds() {
        let a = OperatorSpec::translation(1.0, 1.0);
        let b = OperatorSpec::dilation(0.5f64.sqrt(), 0.5);
        let v = check_translate_dilate(&a, &b, &Polynomial::monomial(1.0, 2), RelationForm::BaFab, &window()).unwrap();
        assert_eq!(v.status, Status::Holds, "{v}");
    }

    #[test]
    fn wrong_dilation_fails_at_zero() {
        let a = OperatorSpec::translation(1.0, 1.0);
        let b = OperatorSpec::dilation(1.0, 1.0 / 3.0);
        let v = check_translate_dilate(&a, &b, &Polynomial::monomial(1.0, 2), RelationForm::BaFab, &window()).unwrap();
        assert_eq!(v.status, Status::Fails);
        let Some(Witness::Function { x, t, lhs, rhs }) = v.witness else {
            panic!("expected a function witness")
        };
        assert_eq!((x.as_str(), t), ("t", 0.0));
        assert!((lhs + 1.0).abs() < 1e-15 && (rhs + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_dilation_commutes() {
        let a = OperatorSpec::translation(1.0, 1.0);
        let b = OperatorSpec::dilation(3.0, 1.0);
        let v = check_translate_dilate(&a, &b, &Polynomial::identity(), RelationForm::BaFab, &window()).unwrap();
        assert!(v.is_holds());
    }

    #[test]
    fn partitioned_translation_is_unknown() {
        let a = OperatorSpec::TranslateDilate {
            alphas: vec![1.0, 2.0],
            parts: vec!["(-inf,0)".parse().unwrap(), "[0,inf)".parse().unwrap()],
            shift: 1.0,
            scale: 1.0,
        };
        let b = OperatorSpec::dilation(0.5f64.sqrt(), 0.5);
        let v = check_translate_dilate(&a, &b, &Polynomial::monomial(1.0, 2), RelationForm::BaFab, &window()).unwrap();
        assert_eq!(v.status, Status::Unknown);
        // a covering partition with a single value behaves like one coefficient
        let a = OperatorSpec::TranslateDilate {
            alphas: vec![1.0, 1.0],
            parts: vec!["(-inf,0)".parse().unwrap(), "[0,inf)".parse().unwrap()],
            shift: 1.0,
            scale: 1.0,
        };
        let v = check_translate_dilate(&a, &b, &Polynomial::monomial(1.0, 2), RelationForm::BaFab, &window()).unwrap();
        assert!(v.is_holds());
    }
}
