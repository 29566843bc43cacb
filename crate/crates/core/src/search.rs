//! Solution families for piecewise multiplication pairs with free scalar
//! coefficients.
//!
//! Every nonnull refined cell `G_i ∩ H_j` contributes one scalar equation
//! `β_j (F₁(c α_i) - c α_i) = 0`, with `c` the value of `a` on the cell, and
//! every nonnull `H_j \ ∪G_i` contributes `β_j δ₀ = 0`. So each `β_j` is
//! either zero or forces `c α_i ∈ Fix(F₁)` for the cells it touches. Free
//! `β`s with the same requirements are grouped; a group is either all zero or
//! not, and the cases are the product of those choices.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{fixed_points, FixedPointSet, Verdict, DEFAULT_FIXPOINT_TOL, SCALAR_EPS};
use crate::error::{Error, Result};
use crate::funcalg::{IntervalSet, PiecewiseExpr};
use crate::operators::{OperatorSpec, Polynomial, RelationForm};

pub const MAX_CASES: usize = 64;

/// Relative tolerance for deciding `F(z) = z` at a concrete `z`.
const FIX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Fixed(f64),
    Free(String),
}

impl Param {
    pub fn free(name: &str) -> Self {
        Param::Free(name.into())
    }

    fn name(&self) -> Option<&str> {
        match self {
            Param::Free(n) => Some(n),
            Param::Fixed(_) => None,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Fixed(v) => write!(f, "{v}"),
            Param::Free(n) => f.write_str(n),
        }
    }
}

/// `Σ p_i w(t) I_{G_i}(t)` with some coefficients `p_i` left symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTemplate {
    pub alphas: Vec<Param>,
    pub weight: PiecewiseExpr,
    pub parts: Vec<IntervalSet>,
}

impl CoefficientTemplate {
    /// A concrete multiplication operator as a template without free names.
    pub fn from_operator(op: &OperatorSpec) -> Result<Self> {
        match op {
            OperatorSpec::PiecewiseMult { alphas, weight, parts } => Ok(CoefficientTemplate {
                alphas: alphas.iter().map(|&a| Param::Fixed(a)).collect(),
                weight: weight.clone(),
                parts: parts.clone(),
            }),
            OperatorSpec::Mult { weight } => Ok(CoefficientTemplate {
                alphas: vec![Param::Fixed(1.0)],
                weight: weight.clone(),
                parts: vec![IntervalSet::real_line()],
            }),
            other => Err(Error::UnsupportedFamily(format!(
                "free coefficients are only supported for multiplication operators, got {}",
                other.class_name()
            ))),
        }
    }

    fn free_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for n in self.alphas.iter().filter_map(Param::name) {
            if !out.contains(&n) {
                out.push(n);
            }
        }
        out
    }

    pub fn instantiate(&self, values: &[(String, f64)]) -> Result<OperatorSpec> {
        let alphas = self
            .alphas
            .iter()
            .map(|p| match p {
                Param::Fixed(v) => Ok(*v),
                Param::Free(n) => lookup(values, n)
                    .ok_or_else(|| Error::UnsupportedFamily(format!("no value given for parameter {n}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let op = OperatorSpec::PiecewiseMult {
            alphas,
            weight: self.weight.clone(),
            parts: self.parts.clone(),
        };
        op.validate()?;
        Ok(op)
    }
}

fn lookup(values: &[(String, f64)], name: &str) -> Option<f64> {
    values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub a: CoefficientTemplate,
    pub b: CoefficientTemplate,
    pub f: Polynomial,
    pub form: RelationForm,
    pub window: IntervalSet,
}

impl FamilySpec {
    /// Free names in order of appearance, `A` first.
    pub fn free_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for n in self.a.free_names().into_iter().chain(self.b.free_names()) {
            if !out.iter().any(|m| m == n) {
                out.push(n.to_string());
            }
        }
        out
    }

    pub fn instantiate(&self, values: &[(String, f64)]) -> Result<(OperatorSpec, OperatorSpec)> {
        Ok((self.a.instantiate(values)?, self.b.instantiate(values)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamConstraint {
    Zero,
    NonZero,
    AnyReal,
    /// `c·p ∈ Fix(F)` for every listed `c`.
    InFix {
        scales: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub params: Vec<(String, ParamConstraint)>,
    /// Groups of parameters that may not all vanish together.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub not_all_zero: Vec<Vec<String>>,
}

impl Case {
    pub fn constraint(&self, name: &str) -> Option<&ParamConstraint> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn descriptions(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .params
            .iter()
            .map(|(n, c)| match c {
                ParamConstraint::Zero => format!("{n} = 0"),
                ParamConstraint::NonZero => format!("{n} ≠ 0"),
                ParamConstraint::AnyReal => format!("{n} ∈ ℝ"),
                ParamConstraint::InFix { scales } => scales
                    .iter()
                    .map(|&c| {
                        if c == 1.0 {
                            format!("{n} ∈ Fix(F)")
                        } else {
                            format!("{c}·{n} ∈ Fix(F)")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(", "),
            })
            .collect();
        for g in &self.not_all_zero {
            out.push(format!("({}) not all zero", g.join(", ")));
        }
        out
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.descriptions();
        if d.is_empty() {
            f.write_str("no constraints")
        } else {
            f.write_str(&d.join("; "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub params: Vec<String>,
    pub cases: Vec<Case>,
    /// `None` when `F(z) = z` identically.
    pub fix: Option<FixedPointSet>,
    pub f: Polynomial,
    pub truncated: bool,
    /// Why no parameter values work, when a concrete coefficient already
    /// breaks the relation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasible: Option<String>,
}

impl SolutionSet {
    pub fn is_fixed(&self, z: f64) -> bool {
        is_fixed(&self.f, z)
    }

    /// Values of `p` with `c·p ∈ Fix(F)` for every `c` in `scales`.
    pub fn admissible(&self, scales: &[f64]) -> Vec<f64> {
        let Some(fix) = &self.fix else {
            return Vec::new();
        };
        let Some((&first, rest)) = scales.split_first() else {
            return Vec::new();
        };
        fix.points
            .iter()
            .map(|z| z / first)
            .filter(|&v| rest.iter().all(|&c| self.is_fixed(c * v)))
            .collect()
    }

    fn satisfies(&self, c: &ParamConstraint, v: f64) -> bool {
        match c {
            ParamConstraint::Zero => v.abs() <= SCALAR_EPS,
            ParamConstraint::NonZero => v.abs() > SCALAR_EPS,
            ParamConstraint::AnyReal => true,
            ParamConstraint::InFix { scales } => scales.iter().all(|&s| self.is_fixed(s * v)),
        }
    }

    pub fn case_contains(&self, case: &Case, values: &[(String, f64)]) -> bool {
        let value = |n: &str| lookup(values, n).unwrap_or(f64::NAN);
        case.params.iter().all(|(n, c)| self.satisfies(c, value(n)))
            && case
                .not_all_zero
                .iter()
                .all(|g| g.iter().any(|n| value(n).abs() > SCALAR_EPS))
    }

    /// Whether some case admits the given parameter values.
    pub fn admits(&self, values: &[(String, f64)]) -> bool {
        self.cases.iter().any(|c| self.case_contains(c, values))
    }

    /// A random member of `case`.
    pub fn sample<R: Rng>(&self, case: &Case, rng: &mut R) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = case
            .params
            .iter()
            .map(|(n, c)| {
                let v = match c {
                    ParamConstraint::Zero => 0.0,
                    ParamConstraint::NonZero => {
                        let m = rng.gen_range(0.25..2.0);
                        if rng.gen_bool(0.5) {
                            m
                        } else {
                            -m
                        }
                    }
                    ParamConstraint::AnyReal => {
                        if rng.gen_bool(0.2) {
                            0.0
                        } else {
                            rng.gen_range(-2.0..2.0)
                        }
                    }
                    ParamConstraint::InFix { scales } => {
                        let opts = self.admissible(scales);
                        opts[rng.gen_range(0..opts.len())]
                    }
                };
                (n.clone(), v)
            })
            .collect();
        for g in &case.not_all_zero {
            if g.iter().all(|n| lookup(&out, n).unwrap_or(0.0) == 0.0) {
                let pick = &g[rng.gen_range(0..g.len())];
                if let Some(slot) = out.iter_mut().find(|(n, _)| n == pick) {
                    slot.1 = rng.gen_range(0.25..2.0);
                }
            }
        }
        out
    }

    pub fn to_verdict(&self) -> Verdict {
        let mut constraints: Vec<String> = self
            .cases
            .iter()
            .enumerate()
            .map(|(k, c)| format!("case {}: {c}", k + 1))
            .collect();
        if self.cases.is_empty() {
            constraints.push(match &self.infeasible {
                Some(why) => format!("no parameter values satisfy the relation: {why}"),
                None => "no parameter values satisfy the relation".into(),
            });
        }
        if self.truncated {
            constraints.push(format!("case list truncated at {MAX_CASES}"));
        }
        Verdict::conditional("solution cases over the refined partition", constraints)
    }
}

impl fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.fix {
            Some(fix) => writeln!(f, "Fix(F) = {fix}")?,
            None => writeln!(f, "Fix(F) = all reals")?,
        }
        if self.cases.is_empty() {
            write!(f, "no solutions")?;
            if let Some(why) = &self.infeasible {
                write!(f, ": {why}")?;
            }
            return writeln!(f);
        }
        for (k, c) in self.cases.iter().enumerate() {
            writeln!(f, "case {}: {c}", k + 1)?;
        }
        if self.truncated {
            writeln!(f, "(truncated at {MAX_CASES} cases)")?;
        }
        Ok(())
    }
}

fn is_fixed(f: &Polynomial, z: f64) -> bool {
    let scale: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, d)| (d * z.powi(j as i32)).abs())
        .sum::<f64>()
        + z.abs();
    (f.eval(z) - z).abs() <= FIX_TOL * (1.0 + scale)
}

#[derive(Default)]
struct Reduction {
    /// Per free `β`: the `(α, c)` pairs it needs when nonzero.
    requires: Vec<(String, Vec<(String, f64)>)>,
    forced_zero: BTreeSet<String>,
    forced_fix: Vec<(String, f64)>,
    infeasible: Option<String>,
}

impl Reduction {
    fn require(&mut self, beta: &str, alpha: &str, c: f64) {
        let slot = match self.requires.iter_mut().find(|(n, _)| n == beta) {
            Some(slot) => slot,
            None => {
                self.requires.push((beta.to_string(), Vec::new()));
                self.requires.last_mut().unwrap()
            }
        };
        slot.1.push((alpha.to_string(), c));
    }

    /// Records that `β` must vanish, or that the family is empty if `β` is a
    /// nonzero constant.
    fn force_zero(&mut self, beta: &Param, why: impl FnOnce() -> String) {
        match beta {
            Param::Free(n) => {
                self.forced_zero.insert(n.clone());
            }
            Param::Fixed(v) if v.abs() > SCALAR_EPS => {
                self.infeasible.get_or_insert_with(why);
            }
            Param::Fixed(_) => {}
        }
    }
}

/// The value of `a` on a subcell: a constant, or an expression that varies.
enum CellWeight {
    Constant(f64),
    Varying(PiecewiseExpr),
}

fn split_by_weight(weight: &PiecewiseExpr, cell: &IntervalSet) -> Vec<(IntervalSet, CellWeight)> {
    let mut out = Vec::new();
    let mut covered = IntervalSet::empty();
    for piece in weight.pieces() {
        let sub = cell.intersect(&piece.domain);
        covered = covered.union(&piece.domain);
        if sub.is_null() {
            continue;
        }
        let w = if piece.expr.is_constant() {
            CellWeight::Constant(piece.expr.eval(0.0))
        } else {
            CellWeight::Varying(PiecewiseExpr::on(sub.clone(), piece.expr.clone()))
        };
        out.push((sub, w));
    }
    let rest = cell.difference(&covered);
    if !rest.is_null() {
        out.push((rest, CellWeight::Constant(0.0)));
    }
    out
}

fn reduce(fam: &FamilySpec, all_fixed: bool) -> Result<Reduction> {
    let mut red = Reduction::default();
    let f = &fam.f;
    let window = &fam.window;
    let supp_b = fam.b.weight.support(window);
    let union_g = fam.a.parts.iter().fold(IntervalSet::empty(), |acc, g| acc.union(g));
    let delta0 = f.coeff(0);

    for (j, (beta, h)) in fam.b.alphas.iter().zip(&fam.b.parts).enumerate() {
        if matches!(beta, Param::Fixed(v) if *v == 0.0) {
            continue;
        }
        let h = h.intersect(window).intersect(&supp_b);
        if h.is_null() {
            continue;
        }
        for (i, (alpha, g)) in fam.a.alphas.iter().zip(&fam.a.parts).enumerate() {
            let cell = g.intersect(&h);
            if cell.is_null() || all_fixed {
                continue;
            }
            for (sub, w) in split_by_weight(&fam.a.weight, &cell) {
                let violated = || format!("the cell G{} ∩ H{} = {sub} breaks the relation", i + 1, j + 1);
                match (alpha, w) {
                    (_, CellWeight::Constant(c)) if c.abs() <= SCALAR_EPS => {
                        if !is_fixed(f, 0.0) {
                            red.force_zero(beta, violated);
                        }
                    }
                    (Param::Fixed(av), CellWeight::Constant(c)) => {
                        if !is_fixed(f, c * av) {
                            red.force_zero(beta, violated);
                        }
                    }
                    (Param::Fixed(av), CellWeight::Varying(e)) => {
                        let scaled = e.scale(*av);
                        let image = scaled
                            .poly_compose(f)
                            .map_err(|e| Error::UnsupportedFamily(e.to_string()))?;
                        if !scaled.sub(&image).support(&sub).is_null() {
                            red.force_zero(beta, violated);
                        }
                    }
                    (Param::Free(an), CellWeight::Constant(c)) => match beta {
                        Param::Free(bn) => red.require(bn, an, c),
                        Param::Fixed(_) => red.forced_fix.push((an.clone(), c)),
                    },
                    (Param::Free(an), CellWeight::Varying(_)) => {
                        return Err(Error::UnsupportedFamily(format!(
                            "the weight of A is not constant on G{} ∩ H{}, so {an} does not enter as a scalar",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        let rest = h.difference(&union_g);
        if !rest.is_null() && delta0.abs() > SCALAR_EPS {
            red.force_zero(beta, || {
                format!("A vanishes on {rest} inside H{} while F(0) = {delta0} ≠ 0", j + 1)
            });
        }
    }
    Ok(red)
}

fn normalized(reqs: &[(String, f64)]) -> Vec<(String, f64)> {
    let mut v = reqs.to_vec();
    v.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    v.dedup_by(|x, y| x.0 == y.0 && (x.1 - y.1).abs() <= SCALAR_EPS * 1f64.max(x.1.abs()));
    v
}

/// Every tuple of free parameter values for which the relation holds, as a
/// disjoint list of cases.
pub fn enumerate_solutions(fam: &FamilySpec) -> Result<SolutionSet> {
    let a_names: BTreeSet<&str> = fam.a.free_names().into_iter().collect();
    if let Some(shared) = fam.b.free_names().into_iter().find(|n| a_names.contains(n)) {
        return Err(Error::UnsupportedFamily(format!(
            "parameter {shared} appears in both operators, so the cell equations are not linear in it"
        )));
    }
    for t in [&fam.a, &fam.b] {
        if t.alphas.len() != t.parts.len() {
            return Err(Error::UnsupportedFamily("coefficient and part counts differ".into()));
        }
    }

    let fix = match fixed_points(&fam.f, DEFAULT_FIXPOINT_TOL) {
        Ok(set) => Some(set),
        Err(Error::DegenerateAllFixed) => None,
        Err(e) => return Err(e),
    };
    let red = reduce(fam, fix.is_none())?;
    let params = fam.free_names();
    let mut out = SolutionSet {
        params: params.clone(),
        cases: Vec::new(),
        fix,
        f: fam.f.clone(),
        truncated: false,
        infeasible: red.infeasible.clone(),
    };
    if red.infeasible.is_some() {
        return Ok(out);
    }

    // groups of free β sharing one requirement set, in order of appearance
    type Group = (Vec<(String, f64)>, Vec<String>);
    let mut groups: Vec<Group> = Vec::new();
    for (beta, reqs) in &red.requires {
        if red.forced_zero.contains(beta) {
            continue;
        }
        let key = normalized(reqs);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(beta.clone()),
            None => groups.push((key, vec![beta.clone()])),
        }
    }

    let total = 1usize.checked_shl(groups.len() as u32).unwrap_or(usize::MAX);
    let mut mask = 0usize;
    while mask < total {
        if out.cases.len() == MAX_CASES {
            out.truncated = true;
            break;
        }
        let active = |g: usize| mask & (1 << (groups.len() - 1 - g)) != 0;
        let mut needs: Vec<(String, f64)> = red.forced_fix.clone();
        for (g, (key, _)) in groups.iter().enumerate() {
            if active(g) {
                needs.extend(key.iter().cloned());
            }
        }
        let needs = normalized(&needs);

        let mut case = Case {
            params: Vec::new(),
            not_all_zero: Vec::new(),
        };
        let mut empty = false;
        for name in &params {
            let c = if red.forced_zero.contains(name) {
                ParamConstraint::Zero
            } else if let Some(g) = groups.iter().position(|(_, m)| m.contains(name)) {
                match (active(g), groups[g].1.len()) {
                    (false, _) => ParamConstraint::Zero,
                    (true, 1) => ParamConstraint::NonZero,
                    (true, _) => ParamConstraint::AnyReal,
                }
            } else {
                let scales: Vec<f64> = needs.iter().filter(|(n, _)| n == name).map(|(_, c)| *c).collect();
                if scales.is_empty() {
                    ParamConstraint::AnyReal
                } else {
                    empty |= out.admissible(&scales).is_empty();
                    ParamConstraint::InFix { scales }
                }
            };
            case.params.push((name.clone(), c));
        }
        for (g, (_, members)) in groups.iter().enumerate() {
            if active(g) && members.len() > 1 {
                case.not_all_zero.push(members.clone());
            }
        }
        if !empty {
            out.cases.push(case);
        }
        mask += 1;
    }
    if out.cases.is_empty() && !red.forced_fix.is_empty() {
        out.infeasible = Some("a nonzero coefficient of B needs a fixed point of F that does not exist".into());
    }
    Ok(out)
}
