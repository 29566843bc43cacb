//! Problem files: a versioned JSON document describing a window, a relation
//! form, the polynomial `F` and the two operators.
//!
//! Scalars may be JSON numbers or arithmetic strings (`"1/3"`, `"sqrt(1/2)"`);
//! coefficients of piecewise multiplications may instead be `{"free": name}`.
//! Intervals are bracket strings such as `"[1,3/2)"`.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::validate_window;
use crate::error::{Error, Result};
use crate::funcalg::{AtomicExpr, IntervalSet, Piece, PiecewiseExpr};
use crate::operators::{AffineMap, OperatorSpec, Polynomial, RelationForm};
use crate::oracle::{Norm, OracleConfig};
use crate::scalar::parse_scalar;
use crate::search::{CoefficientTemplate, FamilySpec, Param};

pub const SCHEMA: &str = "covarkit/problem@1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Text(s) => parse_scalar(s),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Number(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub free: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Value(Scalar),
    Free(FreeParam),
}

impl Coefficient {
    fn to_param(&self) -> Result<Param> {
        match self {
            Coefficient::Value(s) => Ok(Param::Fixed(s.value()?)),
            Coefficient::Free(p) if p.free.trim().is_empty() => {
                Err(Error::Parse("free parameter names must be nonempty".into()))
            }
            Coefficient::Free(p) => Ok(Param::Free(p.free.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinFile {
    pub omega: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Scalar>,
    pub coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceFile {
    #[serde(default = "whole_line")]
    pub domain: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poly: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sin: Vec<SinFile>,
}

fn whole_line() -> String {
    "(-inf,inf)".into()
}

/// A coefficient function: a constant, or pieces that are zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightFile {
    Constant(Scalar),
    Pieces(Vec<PieceFile>),
}

impl Default for WeightFile {
    fn default() -> Self {
        WeightFile::Constant(Scalar::Number(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub slope: Scalar,
    pub intercept: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorFile {
    PiecewiseMult {
        alphas: Vec<Coefficient>,
        #[serde(default)]
        weight: WeightFile,
        parts: Vec<String>,
    },
    Mult {
        weight: WeightFile,
    },
    WeightedComposition {
        #[serde(default)]
        weight: WeightFile,
        map: MapFile,
    },
    PointEval {
        #[serde(default)]
        weight: WeightFile,
        gamma: Scalar,
    },
    TranslateDilate {
        alphas: Vec<Scalar>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        parts: Vec<String>,
        #[serde(default = "zero")]
        shift: Scalar,
        #[serde(default = "one")]
        scale: Scalar,
    },
}

fn zero() -> Scalar {
    Scalar::Number(0.0)
}

fn one() -> Scalar {
    Scalar::Number(1.0)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<Norm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_pass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_fail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub window: String,
    pub form: RelationForm,
    #[serde(rename = "F")]
    pub f: Vec<Scalar>,
    #[serde(rename = "A")]
    pub a: OperatorFile,
    #[serde(rename = "B")]
    pub b: OperatorFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleFile>,
}

/// What the two operators are: concrete, or a template with free coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Operands {
    Concrete(OperatorSpec, OperatorSpec),
    Family(FamilySpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: Option<String>,
    pub window: IntervalSet,
    pub form: RelationForm,
    pub f: Polynomial,
    pub operands: Operands,
    pub oracle: OracleConfig,
}

impl Problem {
    /// The concrete pair, or an error naming the free parameters.
    pub fn operators(&self) -> Result<(&OperatorSpec, &OperatorSpec)> {
        match &self.operands {
            Operands::Concrete(a, b) => Ok((a, b)),
            Operands::Family(fam) => Err(Error::Parse(format!(
                "the problem has free parameters ({}); use search",
                fam.free_names().join(", ")
            ))),
        }
    }

    /// The family view; concrete multiplication pairs become a family
    /// without free names.
    pub fn family(&self) -> Result<FamilySpec> {
        match &self.operands {
            Operands::Family(fam) => Ok(fam.clone()),
            Operands::Concrete(a, b) => Ok(FamilySpec {
                a: CoefficientTemplate::from_operator(a)?,
                b: CoefficientTemplate::from_operator(b)?,
                f: self.f.clone(),
                form: self.form,
                window: self.window.clone(),
            }),
        }
    }
}

fn parse_set(s: &str) -> Result<IntervalSet> {
    s.parse()
}

fn scalars(v: &[Scalar]) -> Result<Vec<f64>> {
    v.iter().map(Scalar::value).collect()
}

fn build_weight(w: &WeightFile) -> Result<PiecewiseExpr> {
    match w {
        WeightFile::Constant(c) => Ok(PiecewiseExpr::constant(c.value()?)),
        WeightFile::Pieces(pieces) => {
            let pieces = pieces
                .iter()
                .map(|p| {
                    let mut expr = AtomicExpr::poly(Polynomial::new(scalars(&p.poly)?));
                    for s in &p.sin {
                        let phase = s.phase.as_ref().map(Scalar::value).transpose()?.unwrap_or(0.0);
                        let weight = Polynomial::new(scalars(&s.coeffs)?);
                        expr = expr.add(&AtomicExpr::sinusoid(weight, s.omega.value()?, phase));
                    }
                    Ok(Piece {
                        domain: parse_set(&p.domain)?,
                        expr,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            PiecewiseExpr::new(pieces)
        }
    }
}

fn build_parts(parts: &[String]) -> Result<Vec<IntervalSet>> {
    parts.iter().map(|s| parse_set(s)).collect()
}

enum Built {
    Concrete(OperatorSpec),
    Template(CoefficientTemplate),
}

fn build_operator(op: &OperatorFile) -> Result<Built> {
    let concrete = match op {
        OperatorFile::PiecewiseMult { alphas, weight, parts } => {
            let params = alphas.iter().map(Coefficient::to_param).collect::<Result<Vec<_>>>()?;
            let weight = build_weight(weight)?;
            let parts = build_parts(parts)?;
            if params.len() != parts.len() {
                return Err(Error::InvalidOperator(format!(
                    "{} coefficients for {} parts",
                    params.len(),
                    parts.len()
                )));
            }
            if params.iter().any(|p| matches!(p, Param::Free(_))) {
                return Ok(Built::Template(CoefficientTemplate {
                    alphas: params,
                    weight,
                    parts,
                }));
            }
            let alphas = params
                .into_iter()
                .map(|p| match p {
                    Param::Fixed(v) => v,
                    Param::Free(_) => unreachable!("free coefficients handled above"),
                })
                .collect();
            OperatorSpec::PiecewiseMult { alphas, weight, parts }
        }
        OperatorFile::Mult { weight } => OperatorSpec::Mult {
            weight: build_weight(weight)?,
        },
        OperatorFile::WeightedComposition { weight, map } => OperatorSpec::WeightedComposition {
            weight: build_weight(weight)?,
            map: AffineMap::new(map.slope.value()?, map.intercept.value()?),
        },
        OperatorFile::PointEval { weight, gamma } => OperatorSpec::PointEval {
            weight: build_weight(weight)?,
            gamma: gamma.value()?,
        },
        OperatorFile::TranslateDilate {
            alphas,
            parts,
            shift,
            scale,
        } => OperatorSpec::TranslateDilate {
            alphas: scalars(alphas)?,
            parts: build_parts(parts)?,
            shift: shift.value()?,
            scale: scale.value()?,
        },
    };
    concrete.validate()?;
    Ok(Built::Concrete(concrete))
}

impl ProblemFile {
    pub fn from_json(src: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src =
            std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&src)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Parses every scalar and interval and validates the operators.
    pub fn build(&self) -> Result<Problem> {
        let window = parse_set(&self.window)?;
        let (lo, hi) = validate_window(&window)?;
        let f = Polynomial::new(scalars(&self.f)?);

        let mut oracle = OracleConfig::new(lo, hi);
        if let Some(o) = &self.oracle {
            oracle.grid = o.grid.unwrap_or(oracle.grid);
            oracle.norm = o.norm.unwrap_or(oracle.norm);
            oracle.tau_pass = o.tau_pass.unwrap_or(oracle.tau_pass);
            oracle.tau_fail = o.tau_fail.unwrap_or(oracle.tau_fail);
            oracle.seed = o.seed.unwrap_or(oracle.seed);
        }
        oracle.validate()?;

        let operands = match (build_operator(&self.a)?, build_operator(&self.b)?) {
            (Built::Concrete(a), Built::Concrete(b)) => Operands::Concrete(a, b),
            (a, b) => {
                let template = |x: Built| match x {
                    Built::Template(t) => Ok(t),
                    Built::Concrete(op) => CoefficientTemplate::from_operator(&op),
                };
                Operands::Family(FamilySpec {
                    a: template(a)?,
                    b: template(b)?,
                    f: f.clone(),
                    form: self.form,
                    window: window.clone(),
                })
            }
        };
        Ok(Problem {
            name: self.name.clone(),
            window,
            form: self.form,
            f,
            operands,
            oracle,
        })
    }

    /// A file describing a concrete problem. Numbers are written as JSON numbers.
    pub fn from_problem(p: &Problem) -> Result<Self> {
        let (a, b) = match &p.operands {
            Operands::Concrete(a, b) => (operator_file(a), operator_file(b)),
            Operands::Family(fam) => (template_file(&fam.a), template_file(&fam.b)),
        };
        Ok(ProblemFile {
            schema: SCHEMA.into(),
            name: p.name.clone(),
            description: None,
            window: p.window.to_string(),
            form: p.form,
            f: p.f.coeffs().iter().map(|&c| Scalar::Number(c)).collect(),
            a,
            b,
            oracle: Some(OracleFile {
                grid: Some(p.oracle.grid),
                norm: Some(p.oracle.norm),
                tau_pass: Some(p.oracle.tau_pass),
                tau_fail: Some(p.oracle.tau_fail),
                seed: Some(p.oracle.seed),
            }),
        })
    }
}

fn numbers(v: &[f64]) -> Vec<Scalar> {
    v.iter().map(|&c| Scalar::Number(c)).collect()
}

fn weight_file(w: &PiecewiseExpr) -> WeightFile {
    WeightFile::Pieces(
        w.pieces()
            .iter()
            .map(|p| {
                let mut sin = Vec::new();
                for term in p.expr.trig_terms() {
                    for (part, phase) in [(&term.sin_part, 0.0), (&term.cos_part, FRAC_PI_2)] {
                        if !part.is_zero() {
                            sin.push(SinFile {
                                omega: Scalar::Number(term.omega),
                                phase: (phase != 0.0).then_some(Scalar::Number(phase)),
                                coeffs: numbers(part.coeffs()),
                            });
                        }
                    }
                }
                PieceFile {
                    domain: p.domain.to_string(),
                    poly: numbers(p.expr.poly_part().coeffs()),
                    sin,
                }
            })
            .collect(),
    )
}

fn operator_file(op: &OperatorSpec) -> OperatorFile {
    match op {
        OperatorSpec::PiecewiseMult { alphas, weight, parts } => OperatorFile::PiecewiseMult {
            alphas: alphas.iter().map(|&a| Coefficient::Value(Scalar::Number(a))).collect(),
            weight: weight_file(weight),
            parts: parts.iter().map(ToString::to_string).collect(),
        },
        OperatorSpec::Mult { weight } => OperatorFile::Mult {
            weight: weight_file(weight),
        },
        OperatorSpec::WeightedComposition { weight, map } => OperatorFile::WeightedComposition {
            weight: weight_file(weight),
            map: MapFile {
                slope: map.slope.into(),
                intercept: map.intercept.into(),
            },
        },
        OperatorSpec::PointEval { weight, gamma } => OperatorFile::PointEval {
            weight: weight_file(weight),
            gamma: (*gamma).into(),
        },
        OperatorSpec::TranslateDilate {
            alphas,
            parts,
            shift,
            scale,
        } => OperatorFile::TranslateDilate {
            alphas: numbers(alphas),
            parts: parts.iter().map(ToString::to_string).collect(),
            shift: (*shift).into(),
            scale: (*scale).into(),
        },
    }
}

fn template_file(t: &CoefficientTemplate) -> OperatorFile {
    OperatorFile::PiecewiseMult {
        alphas: t
            .alphas
            .iter()
            .map(|p| match p {
                Param::Fixed(v) => Coefficient::Value(Scalar::Number(*v)),
                Param::Free(n) => Coefficient::Free(FreeParam { free: n.clone() }),
            })
            .collect(),
        weight: weight_file(&t.weight),
        parts: t.parts.iter().map(ToString::to_string).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WAVELET: &str = r#"{
        "schema": "covarkit/problem@1",
        "name": "wavelet",
        "window": "[-8,8]",
        "form": "BA=F(A)B",
        "F": [0, 0, 1],
        "A": {"class": "translate_dilate", "alphas": [1], "shift": 1},
        "B": {"class": "translate_dilate", "alphas": ["sqrt(1/2)"], "scale": "1/2"}
    }"#;

    const FAMILY: &str = r#"{
        "schema": "covarkit/problem@1",
        "window": "[0,1]",
        "form": "AB=BF(A)",
        "F": [0, 0, 0, 1],
        "A": {"class": "piecewise_mult", "alphas": [0.7, {"free": "beta"}, -1.3],
              "parts": ["[0,1/3]", "(1/3,1/2)", "(1/2,1]"]},
        "B": {"class": "piecewise_mult", "alphas": [1], "parts": ["(1/3,1/2)"]},
        "oracle": {"grid": 2048, "norm": "2"}
    }"#;

    #[test]
    fn parses_scalars_and_defaults() {
        let p = ProblemFile::from_json(WAVELET).unwrap().build().unwrap();
        let (_, b) = p.operators().unwrap();
        assert_eq!(b, &OperatorSpec::dilation(0.5f64.sqrt(), 0.5));
        assert_eq!(p.oracle.grid, 4096);
        assert_eq!(p.form, RelationForm::BaFab);
    }

    #[test]
    fn free_parameters_make_a_family() {
        let p = ProblemFile::from_json(FAMILY).unwrap().build().unwrap();
        assert!(p.operators().is_err());
        let fam = p.family().unwrap();
        assert_eq!(fam.free_names(), vec!["beta".to_string()]);
        assert_eq!(p.oracle.norm, Norm::Two);
        assert_eq!(p.oracle.grid, 2048);
    }

    #[test]
    fn raw_round_trip() {
        for src in [WAVELET, FAMILY] {
            let file = ProblemFile::from_json(src).unwrap();
            assert_eq!(ProblemFile::from_json(&file.to_json()).unwrap(), file);
        }
    }

    #[test]
    fn semantic_round_trip() {
        let src = r#"{
            "schema": "covarkit/problem@1",
            "window": "[0,3]",
            "form": "AB=BF(A)",
            "F": [0, 0.25, 0.75],
            "A": {"class": "point_eval", "gamma": 1,
                  "weight": [{"domain": "[0,2]", "poly": [0, 2, -1]}]},
            "B": {"class": "mult", "weight": [
                  {"domain": "[0,2]", "poly": [1]},
                  {"domain": "(2,3]", "poly": [-1, 3, -3, 1], "sin": [{"omega": "pi", "phase": "pi/3", "coeffs": [0, 1]}]}]}
        }"#;
        let p = ProblemFile::from_json(src).unwrap().build().unwrap();
        let again = ProblemFile::from_problem(&p).unwrap();
        let q = ProblemFile::from_json(&again.to_json()).unwrap().build().unwrap();
        let (pa, pb) = p.operators().unwrap();
        let (qa, qb) = q.operators().unwrap();
        assert_eq!(pa, qa);
        for t in [0.5, 2.25, 2.9] {
            assert!((pb.weight().eval(t) - qb.weight().eval(t)).abs() < 1e-14);
        }
        assert_eq!(p.window, q.window);
        assert_eq!(p.f, q.f);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ProblemFile::from_json("{").is_err());
        let wrong_schema = WAVELET.replace("problem@1", "problem@9");
        assert!(ProblemFile::from_json(&wrong_schema).is_err());
        let bad_window = WAVELET.replace("[-8,8]", "[0,1] U [2,3]");
        assert!(ProblemFile::from_json(&bad_window).unwrap().build().is_err());
        let bad_scale = WAVELET.replace("\"1/2\"", "\"-1\"");
        assert!(matches!(
            ProblemFile::from_json(&bad_scale).unwrap().build(),
            Err(Error::InvalidOperator(_))
        ));
        let unknown_class = WAVELET.replace("translate_dilate\", \"alphas\": [1]", "shift_op\", \"alphas\": [1]");
        assert!(ProblemFile::from_json(&unknown_class).is_err());
    }
}
