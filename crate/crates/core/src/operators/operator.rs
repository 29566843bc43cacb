use std::fmt;

use crate::error::{Error, Result};
use crate::funcalg::{AtomicExpr, IntervalSet, PiecewiseExpr};
use crate::operators::affine::AffineMap;
use crate::operators::kernel::Kernel;

/// The operator classes the toolkit can decide relations for.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `(Ax)(t) = Σ α_i a(t) I_{G_i}(t) x(t)`
    PiecewiseMult {
        alphas: Vec<f64>,
        weight: PiecewiseExpr,
        parts: Vec<IntervalSet>,
    },
    /// `(Ax)(t) = a(t) x(t)`
    Mult { weight: PiecewiseExpr },
    /// `(Ax)(t) = a(t) x(υ(t))`
    WeightedComposition { weight: PiecewiseExpr, map: AffineMap },
    /// `(Ax)(t) = a(t) x(γ)`
    PointEval { weight: PiecewiseExpr, gamma: f64 },
    /// `(Ax)(t) = c(t) x(scale·t - shift)` with `c = Σ α_i I_{G_i}`, or the
    /// constant `α₀` on the whole line when `parts` is empty.
    TranslateDilate {
        alphas: Vec<f64>,
        parts: Vec<IntervalSet>,
        shift: f64,
        scale: f64,
    },
}

fn check_null_overlaps(parts: &[IntervalSet]) -> Result<()> {
    for (i, g) in parts.iter().enumerate() {
        for (j, h) in parts.iter().enumerate().skip(i + 1) {
            let common = g.intersect(h);
            if !common.is_null() {
                return Err(Error::InvalidOperator(format!(
                    "parts {} and {} overlap on {common} (positive measure)",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// `Σ α_i I_{G_i}` as an expression.
fn indicator_sum(alphas: &[f64], parts: &[IntervalSet]) -> PiecewiseExpr {
    alphas
        .iter()
        .zip(parts)
        .fold(PiecewiseExpr::zero(), |acc, (&alpha, g)| {
            acc.add(&PiecewiseExpr::on(g.clone(), AtomicExpr::constant(alpha)))
        })
}

impl OperatorSpec {
    pub fn translation(alpha: f64, shift: f64) -> Self {
        OperatorSpec::TranslateDilate {
            alphas: vec![alpha],
            parts: Vec::new(),
            shift,
            scale: 1.0,
        }
    }

    pub fn dilation(beta: f64, scale: f64) -> Self {
        OperatorSpec::TranslateDilate {
            alphas: vec![beta],
            parts: Vec::new(),
            shift: 0.0,
            scale,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            OperatorSpec::PiecewiseMult { .. } => "piecewise_mult",
            OperatorSpec::Mult { .. } => "mult",
            OperatorSpec::WeightedComposition { .. } => "weighted_composition",
            OperatorSpec::PointEval { .. } => "point_eval",
            OperatorSpec::TranslateDilate { .. } => "translate_dilate",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::PiecewiseMult { alphas, parts, .. } => {
                if alphas.len() != parts.len() {
                    return Err(Error::InvalidOperator(format!(
                        "{} coefficients for {} parts",
                        alphas.len(),
                        parts.len()
                    )));
                }
                check_null_overlaps(parts)
            }
            OperatorSpec::TranslateDilate {
                alphas,
                parts,
                shift,
                scale,
            } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidOperator(format!(
                        "dilation factor must be positive, got {scale}"
                    )));
                }
                if !shift.is_finite() {
                    return Err(Error::InvalidOperator("shift must be finite".into()));
                }
                let consistent = if parts.is_empty() {
                    alphas.len() == 1
                } else {
                    alphas.len() == parts.len()
                };
                if !consistent {
                    return Err(Error::InvalidOperator(format!(
                        "{} coefficients for {} parts (use one coefficient and no parts for the whole line)",
                        alphas.len(),
                        parts.len()
                    )));
                }
                check_null_overlaps(parts)
            }
            OperatorSpec::WeightedComposition { map, .. } => {
                if !(map.slope.is_finite() && map.intercept.is_finite()) {
                    return Err(Error::InvalidOperator("non-finite composition map".into()));
                }
                Ok(())
            }
            OperatorSpec::PointEval { gamma, .. } => {
                if !gamma.is_finite() {
                    return Err(Error::InvalidOperator("evaluation point must be finite".into()));
                }
                Ok(())
            }
            OperatorSpec::Mult { .. } => Ok(()),
        }
    }

    /// The map `υ` through which `x` is read: `(Ax)(t) = w(t)·x(υ(t))`.
    pub fn map(&self) -> AffineMap {
        match self {
            OperatorSpec::PiecewiseMult { .. } | OperatorSpec::Mult { .. } => AffineMap::identity(),
            OperatorSpec::WeightedComposition { map, .. } => *map,
            OperatorSpec::PointEval { gamma, .. } => AffineMap::constant(*gamma),
            OperatorSpec::TranslateDilate { shift, scale, .. } => AffineMap::new(*scale, -*shift),
        }
    }

    /// The coefficient function `w` in `(Ax)(t) = w(t)·x(υ(t))`.
    pub fn weight(&self) -> PiecewiseExpr {
        match self {
            OperatorSpec::PiecewiseMult { alphas, weight, parts } => weight
                .mul(&indicator_sum(alphas, parts))
                .expect("indicator sums are polynomial"),
            OperatorSpec::Mult { weight }
            | OperatorSpec::WeightedComposition { weight, .. }
            | OperatorSpec::PointEval { weight, .. } => weight.clone(),
            OperatorSpec::TranslateDilate { alphas, parts, .. } => {
                if parts.is_empty() {
                    PiecewiseExpr::constant(alphas[0])
                } else {
                    indicator_sum(alphas, parts)
                }
            }
        }
    }

    pub fn kernel(&self) -> Kernel {
        Kernel::new(self.weight(), self.map())
    }

    /// True when the operator only multiplies `x(t)` pointwise.
    pub fn is_multiplicative(&self) -> bool {
        self.map() == AffineMap::identity()
    }

    /// Points where the coefficient function may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            OperatorSpec::PiecewiseMult { weight, parts, .. } => {
                let mut v = weight.breakpoints();
                v.extend(parts.iter().flat_map(IntervalSet::endpoints));
                v
            }
            OperatorSpec::Mult { weight }
            | OperatorSpec::WeightedComposition { weight, .. }
            | OperatorSpec::PointEval { weight, .. } => weight.breakpoints(),
            OperatorSpec::TranslateDilate { parts, .. } => parts.iter().flat_map(IntervalSet::endpoints).collect(),
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Pointwise application following each class's defining formula.
    pub fn apply(&self, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        match self {
            OperatorSpec::PiecewiseMult { alphas, weight, parts } => {
                let coef: f64 = alphas
                    .iter()
                    .zip(parts)
                    .filter(|(_, g)| g.contains(t))
                    .map(|(a, _)| a)
                    .sum();
                if coef == 0.0 {
                    0.0
                } else {
                    coef * weight.eval(t) * x(t)
                }
            }
            OperatorSpec::Mult { weight } => weight.eval(t) * x(t),
            OperatorSpec::WeightedComposition { weight, map } => weight.eval(t) * x(map.apply(t)),
            OperatorSpec::PointEval { weight, gamma } => weight.eval(t) * x(*gamma),
            OperatorSpec::TranslateDilate {
                alphas,
                parts,
                shift,
                scale,
            } => {
                let coef: f64 = if parts.is_empty() {
                    alphas[0]
                } else {
                    alphas
                        .iter()
                        .zip(parts)
                        .filter(|(_, g)| g.contains(t))
                        .map(|(a, _)| a)
                        .sum()
                };
                if coef == 0.0 {
                    0.0
                } else {
                    coef * x(scale * t - shift)
                }
            }
        }
    }

    /// Closed-form `A^m` (`m ≥ 1`), in the same class where the class is
    /// closed under powers and as a weighted composition otherwise.
    pub fn power(&self, m: usize) -> Result<OperatorSpec> {
        if m == 0 {
            return Err(Error::InvalidOperator("power exponent must be at least 1".into()));
        }
        Ok(match self {
            OperatorSpec::Mult { weight } => OperatorSpec::Mult {
                weight: weight.powi(m)?,
            },
            OperatorSpec::PiecewiseMult { alphas, weight, parts } => OperatorSpec::PiecewiseMult {
                alphas: alphas.iter().map(|a| a.powi(m as i32)).collect(),
                weight: weight.powi(m)?,
                parts: parts.clone(),
            },
            OperatorSpec::PointEval { weight, gamma } => {
                let at_gamma = weight.eval(*gamma);
                OperatorSpec::PointEval {
                    weight: weight.scale(at_gamma.powi(m as i32 - 1)),
                    gamma: *gamma,
                }
            }
            OperatorSpec::WeightedComposition { weight, map } => {
                let k = Kernel::new(weight.clone(), *map).power(m)?;
                OperatorSpec::WeightedComposition {
                    weight: k.weight,
                    map: k.map,
                }
            }
            OperatorSpec::TranslateDilate {
                alphas,
                parts,
                shift,
                scale,
            } => {
                if parts.is_empty() {
                    let it = self.map().iterate(m as u32);
                    OperatorSpec::TranslateDilate {
                        alphas: vec![alphas[0].powi(m as i32)],
                        parts: Vec::new(),
                        shift: -it.intercept,
                        scale: it.slope,
                    }
                } else if *shift == 0.0 && *scale == 1.0 {
                    OperatorSpec::TranslateDilate {
                        alphas: alphas.iter().map(|a| a.powi(m as i32)).collect(),
                        parts: parts.clone(),
                        shift: 0.0,
                        scale: 1.0,
                    }
                } else {
                    // The indicator is re-read at every shifted argument, so the
                    // power is a weighted composition with a product weight.
                    let k = self.kernel().power(m)?;
                    OperatorSpec::WeightedComposition {
                        weight: k.weight,
                        map: k.map,
                    }
                }
            }
        })
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
        let sets = |v: &[IntervalSet]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            OperatorSpec::PiecewiseMult { alphas, weight, parts } => write!(
                f,
                "piecewise multiplication, α = ({}), parts = ({}), a = {weight}",
                list(alphas),
                sets(parts)
            ),
            OperatorSpec::Mult { weight } => write!(f, "multiplication by {weight}"),
            OperatorSpec::WeightedComposition { weight, map } => {
                write!(f, "weighted composition, weight {weight}, map {map}")
            }
            OperatorSpec::PointEval { weight, gamma } => {
                write!(f, "point evaluation at {gamma}, weight {weight}")
            }
            OperatorSpec::TranslateDilate {
                alphas,
                parts,
                shift,
                scale,
            } => {
                if parts.is_empty() {
                    write!(f, "{} · x({scale}t - {shift})", alphas[0])
                } else {
                    write!(
                        f,
                        "Σ α_i I_G_i(t) x({scale}t - {shift}), α = ({}), parts = ({})",
                        list(alphas),
                        sets(parts)
                    )
                }
            }
        }
    }
}
