//! Weighted composition pairs on `C[α,β]`.

use crate::error::{Error, Result};
use crate::funcalg::IntervalSet;
use crate::operators::{Kernel, OperatorSpec, Polynomial, RelationForm};

use super::verdict::{Verdict, Witness};

const RULE: &str = "weighted composition pair";

/// `A x = a x(υ)`, `B x = b x(σ)`, `F = δ z^m`, both maps sending the window
/// into itself.
///
/// For `AB = BF(A)` the sides are `a(t) b(υ(t)) x(σ(υ(t)))` and
/// `δ b(t) ∏_{k<m} a(υ^k(σ(t))) x(υ^m(σ(t)))`. If the maps agree the relation
/// is the weight identity; otherwise both weights must vanish, since `x` can be
/// chosen to separate two distinct points.
pub fn check_composition_pair(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
    window: &IntervalSet,
) -> Result<Verdict> {
    for op in [a, b] {
        if !matches!(op, OperatorSpec::WeightedComposition { .. }) {
            return Err(Error::InvalidOperator(format!(
                "composition checker got a {} operator",
                op.class_name()
            )));
        }
    }
    let Some((delta, m)) = f.as_monomial() else {
        return Ok(Verdict::unknown(RULE, format!("F = {f} is not a monomial δz^m")));
    };
    let (ka, kb) = (a.kernel(), b.kernel());
    let sides = || -> Result<(Kernel, Kernel)> {
        let am = ka.power(m)?;
        Ok(match form {
            RelationForm::AbBfa => (ka.compose(&kb)?, kb.compose(&am)?.scale(delta)),
            RelationForm::BaFab => (kb.compose(&ka)?, am.compose(&kb)?.scale(delta)),
        })
    };
    let (lhs, rhs) = match sides() {
        Ok(s) => s,
        Err(e) => return Ok(Verdict::unknown(RULE, e.to_string())),
    };

    let mut cert = vec![format!("left map {}, right map {}", lhs.map, rhs.map)];
    if lhs.map.approx_eq(&rhs.map) {
        let diff = lhs.weight.sub(&rhs.weight);
        let bad = diff.support(window);
        if bad.is_null() {
            cert.push("maps agree and the weight identity holds on the window".into());
            return Ok(Verdict::holds(RULE, cert));
        }
        cert.push(format!("maps agree but the weight identity fails on {bad}"));
        return Ok(Verdict::fails(RULE, Witness::on_set(bad), cert));
    }
    let live = lhs.weight.support(window).union(&rhs.weight.support(window));
    if live.is_null() {
        cert.push("maps differ but both weights vanish on the window".into());
        return Ok(Verdict::holds(RULE, cert));
    }
    cert.push(format!("maps differ and a weight is nonzero on {live}"));
    Ok(Verdict::fails(RULE, Witness::on_set(live), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Status;
    use crate::funcalg::{AtomicExpr, PiecewiseExpr};
    use crate::operators::AffineMap;

    fn wc(weight: PiecewiseExpr, slope: f64, intercept: f64) -> OperatorSpec {
        OperatorSpec::WeightedComposition {
            weight,
            map: AffineMap::new(slope, intercept),
        }
    }

    #[test]
    fn unit_weights_with_shift_and_halving() {
        let one = PiecewiseExpr::constant(1.0);
        let a = wc(one.clone(), 1.0, -1.0);
        let b = wc(one, 0.5, 0.0);
        let w = "[-8,8]".parse().unwrap();
        let f = Polynomial::monomial(1.0, 2);
        let v = check_composition_pair(&a, &b, &f, RelationForm::BaFab, &w).unwrap();
        assert_eq!(v.status, Status::Holds);
        // with A first the maps are t/2 - 1/2 and t/2 - 2
        let v = check_composition_pair(&a, &b, &f, RelationForm::AbBfa, &w).unwrap();
        assert_eq!(v.status, Status::Fails);
    }

    #[test]
    fn equal_operators_commute() {
        let w: IntervalSet = "[0,1]".parse().unwrap();
        let a = wc(PiecewiseExpr::global(AtomicExpr::from_coeffs(&[1.0, 2.0])), -1.0, 1.0);
        let v = check_composition_pair(&a, &a, &Polynomial::identity(), RelationForm::AbBfa, &w).unwrap();
        assert!(v.is_holds());
    }

    #[test]
    fn coefficient_mismatch_fails() {
        let w: IntervalSet = "[0,1]".parse().unwrap();
        let id = wc(PiecewiseExpr::constant(1.0), 1.0, 0.0);
        let v = check_composition_pair(&id, &id, &Polynomial::monomial(2.0, 1), RelationForm::AbBfa, &w).unwrap();
        assert!(v.is_fails());
        let Some(Witness::Set { set, .. }) = v.witness else {
            panic!()
        };
        assert_eq!(set, w);
    }

    #[test]
    fn reflection_fixture() {
        // υ = 1 - t, σ = t/2 + 1/4 commute with υ³ = υ; b = t(1 - t) is υ-symmetric
        let w: IntervalSet = "[0,1]".parse().unwrap();
        let a = wc(PiecewiseExpr::constant(1.0), -1.0, 1.0);
        let sym = wc(
            PiecewiseExpr::global(AtomicExpr::from_coeffs(&[0.0, 1.0, -1.0])),
            0.5,
            0.25,
        );
        let f = Polynomial::monomial(1.0, 3);
        assert!(check_composition_pair(&a, &sym, &f, RelationForm::AbBfa, &w)
            .unwrap()
            .is_holds());
        let skew = wc(PiecewiseExpr::global(AtomicExpr::from_coeffs(&[0.0, 1.0])), 0.5, 0.25);
        assert!(check_composition_pair(&a, &skew, &f, RelationForm::AbBfa, &w)
            .unwrap()
            .is_fails());
    }
}
