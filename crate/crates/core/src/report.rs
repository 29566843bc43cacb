//! End-to-end runs over a problem and the reports they produce, in text and
//! as JSON documents that deserialize back to the same values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criteria::{decide, fixed_points, FixedPointSet, Status, Verdict};
use crate::error::{Error, Result};
use crate::operators::{Polynomial, RelationForm};
use crate::oracle::{crosscheck, residual, Consistency, OracleConfig, OracleReport};
use crate::problem::{Operands, Problem};
use crate::search::{enumerate_solutions, SolutionSet};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_INVALID: i32 = 64;
pub const EXIT_WINDOW: i32 = 65;
pub const EXIT_UNSUPPORTED: i32 = 66;

/// Exit status of `check`. An oracle contradiction overrides the verdict;
/// an ambiguous residual does not.
pub fn check_exit_code(status: Status, consistency: Consistency) -> i32 {
    if consistency == Consistency::Inconsistent {
        return EXIT_INCONSISTENT;
    }
    match status {
        Status::Holds => EXIT_HOLDS,
        Status::Fails => EXIT_FAILS,
        Status::Unknown | Status::ConditionalOn => EXIT_UNKNOWN,
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::WindowTooSmall(_) => EXIT_WINDOW,
        Error::UnsupportedFamily(_) => EXIT_UNSUPPORTED,
        Error::ExprClassOverflow(_) => EXIT_UNKNOWN,
        Error::DegenerateAllFixed => EXIT_HOLDS,
        Error::InvalidInterval(_)
        | Error::InvalidExpr(_)
        | Error::InvalidOperator(_)
        | Error::NotContinuous { .. }
        | Error::InvalidConfig(_)
        | Error::Parse(_) => EXIT_INVALID,
    }
}

fn relation_text(form: RelationForm, f: &Polynomial) -> String {
    format!("{form} with F(z) = {f}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub form: RelationForm,
    #[serde(rename = "F")]
    pub f: Polynomial,
    pub verdict: Verdict,
    pub oracle: OracleReport,
    pub consistency: Consistency,
    pub exit_code: i32,
}

pub fn run_check(problem: &Problem) -> Result<CheckReport> {
    let (a, b) = problem.operators()?;
    let verdict = decide(a, b, &problem.f, problem.form, &problem.window)?;
    let oracle = residual(a, b, &problem.f, problem.form, &problem.oracle)?;
    let consistency = crosscheck(verdict.status, oracle.residual, &problem.oracle);
    Ok(CheckReport {
        problem: problem.name.clone(),
        form: problem.form,
        f: problem.f.clone(),
        exit_code: check_exit_code(verdict.status, consistency),
        verdict,
        oracle,
        consistency,
    })
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.problem {
            writeln!(f, "problem: {name}")?;
        }
        writeln!(f, "relation: {}", relation_text(self.form, &self.f))?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(
            f,
            "oracle: residual {:.3e} ({} norm, {} of {} grid points) {}",
            self.oracle.residual, self.oracle.norm, self.oracle.retained, self.oracle.grid, self.consistency
        )?;
        if let Some(row) = self.oracle.worst().filter(|r| r.residual > 0.0) {
            writeln!(f, "  largest on x = {}: {:.3e}", row.function, row.residual)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub form: RelationForm,
    #[serde(rename = "F")]
    pub f: Polynomial,
    pub config: OracleConfig,
    pub report: OracleReport,
}

pub fn run_oracle(problem: &Problem) -> Result<OracleRun> {
    let (a, b) = problem.operators()?;
    let report = residual(a, b, &problem.f, problem.form, &problem.oracle)?;
    Ok(OracleRun {
        problem: problem.name.clone(),
        form: problem.form,
        f: problem.f.clone(),
        config: problem.oracle.clone(),
        report,
    })
}

impl fmt::Display for OracleRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.problem {
            writeln!(f, "problem: {name}")?;
        }
        writeln!(f, "relation: {}", relation_text(self.form, &self.f))?;
        let c = &self.config;
        writeln!(
            f,
            "window [{}, {}], grid {} ({} kept), norm {}, seed {}",
            c.lo, c.hi, c.grid, self.report.retained, c.norm, c.seed
        )?;
        let width = self
            .report
            .rows
            .iter()
            .map(|r| r.function.len())
            .max()
            .unwrap_or(8)
            .max(8);
        writeln!(f, "{:<width$}  {:>12}  {:>12}", "x", "residual", "worst t")?;
        for r in &self.report.rows {
            let t = r.worst_t.map_or("-".to_string(), |t| format!("{t:.6}"));
            writeln!(f, "{:<width$}  {:>12.3e}  {:>12}", r.function, r.residual, t)?;
        }
        writeln!(f, "max residual {:.3e}", self.report.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub form: RelationForm,
    #[serde(rename = "F")]
    pub f: Polynomial,
    /// Cases for a family with free coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions: Option<SolutionSet>,
    /// Without free coefficients the family is a single pair and the search
    /// is the plain check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plain: Option<Verdict>,
}

pub fn run_search(problem: &Problem) -> Result<SearchReport> {
    let (solutions, plain) = match &problem.operands {
        Operands::Family(fam) => (Some(enumerate_solutions(fam)?), None),
        Operands::Concrete(a, b) => (None, Some(decide(a, b, &problem.f, problem.form, &problem.window)?)),
    };
    Ok(SearchReport {
        problem: problem.name.clone(),
        form: problem.form,
        f: problem.f.clone(),
        solutions,
        plain,
    })
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.problem {
            writeln!(f, "problem: {name}")?;
        }
        writeln!(f, "relation: {}", relation_text(self.form, &self.f))?;
        if let Some(sol) = &self.solutions {
            write!(f, "{sol}")?;
        }
        if let Some(v) = &self.plain {
            writeln!(f, "no free parameters, single case: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixpointReport {
    #[serde(rename = "F")]
    pub f: Polynomial,
    pub all_reals: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<FixedPointSet>,
}

pub fn run_fixpoints(f: &Polynomial, tol: f64) -> Result<FixpointReport> {
    let (all_reals, fixed) = match fixed_points(f, tol) {
        Ok(set) => (false, Some(set)),
        Err(Error::DegenerateAllFixed) => (true, None),
        Err(e) => return Err(e),
    };
    Ok(FixpointReport {
        f: f.clone(),
        all_reals,
        fixed,
    })
}

impl fmt::Display for FixpointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F(z) = {}", self.f)?;
        let Some(set) = &self.fixed else {
            return writeln!(f, "Fix(F) = all reals");
        };
        writeln!(f, "Fix(F) = {set}")?;
        for (z, r) in set.points.iter().zip(&set.residuals) {
            writeln!(f, "  z = {z:<24} |F(z) - z| = {r:.3e}")?;
        }
        for (z, r) in &set.unresolved {
            writeln!(f, "  unresolved near {z}: residual {r:.3e} above tolerance {}", set.tol)?;
        }
        Ok(())
    }
}
