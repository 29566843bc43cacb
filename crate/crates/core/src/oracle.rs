//! Numeric cross-check: both sides of the relation applied to a battery of
//! test functions on a midpoint grid, away from every breakpoint.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{check_window, validate_window, Status};
use crate::error::{Error, Result};
use crate::funcalg::IntervalSet;
use crate::operators::{relation_sides, OperatorSpec, Polynomial, RelationForm};

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_TAU_PASS: f64 = 1e-9;
pub const DEFAULT_TAU_FAIL: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 0x5eed;

const RANDOM_KNOTS: usize = 9;
const RANDOM_FUNCTIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::One => "1",
            Norm::Two => "2",
            Norm::Inf => "inf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Norm::One),
            "2" => Ok(Norm::Two),
            "inf" | "Inf" | "∞" => Ok(Norm::Inf),
            other => Err(Error::InvalidConfig(format!("norm must be 1, 2 or inf, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
    pub norm: Norm,
    pub tau_pass: f64,
    pub tau_fail: f64,
    pub seed: u64,
}

impl OracleConfig {
    pub fn new(lo: f64, hi: f64) -> Self {
        OracleConfig {
            lo,
            hi,
            grid: DEFAULT_GRID,
            norm: Norm::Inf,
            tau_pass: DEFAULT_TAU_PASS,
            tau_fail: DEFAULT_TAU_FAIL,
            seed: DEFAULT_SEED,
        }
    }

    pub fn for_window(window: &IntervalSet) -> Result<Self> {
        let (lo, hi) = validate_window(window)?;
        Ok(Self::new(lo, hi))
    }

    pub fn window(&self) -> IntervalSet {
        IntervalSet::closed(self.lo, self.hi)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.grid as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidConfig(format!(
                "window [{}, {}] is not a bounded interval",
                self.lo, self.hi
            )));
        }
        if self.grid == 0 {
            return Err(Error::InvalidConfig("grid must be positive".into()));
        }
        if !(self.tau_pass > 0.0 && self.tau_pass < self.tau_fail) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < tau_pass < tau_fail, got {} and {}",
                self.tau_pass, self.tau_fail
            )));
        }
        Ok(())
    }

    /// Midpoints of the uniform grid, minus those strictly closer than half a
    /// step to a breakpoint.
    pub fn grid_points(&self, breakpoints: &[f64]) -> Vec<f64> {
        let h = self.step();
        let mut bps: Vec<f64> = breakpoints.iter().copied().filter(|p| p.is_finite()).collect();
        bps.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(self.grid);
        let mut next = 0;
        for k in 0..self.grid {
            let t = self.lo + (k as f64 + 0.5) * h;
            while next < bps.len() && bps[next] < t - 0.5 * h {
                next += 1;
            }
            let near = bps[next..]
                .iter()
                .take_while(|&&p| p < t + 0.5 * h)
                .any(|&p| (p - t).abs() < 0.5 * h);
            if !near {
                out.push(t);
            }
        }
        out
    }
}

/// A member of the test battery. All members are continuous on ℝ.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Monomial(u32),
    SinPi,
    /// `(t-c)²(d-t)²` on `[c,d]` scaled to peak 1, zero elsewhere.
    Bump {
        c: f64,
        d: f64,
    },
    /// Linear interpolation through the knots, constant beyond them.
    PiecewiseLinear {
        label: usize,
        knots: Vec<(f64, f64)>,
    },
}

impl TestFunction {
    pub fn name(&self) -> String {
        match self {
            TestFunction::Monomial(0) => "1".into(),
            TestFunction::Monomial(1) => "t".into(),
            TestFunction::Monomial(k) => format!("t^{k}"),
            TestFunction::SinPi => "sin(pi t)".into(),
            TestFunction::Bump { c, d } => format!("bump[{c},{d}]"),
            TestFunction::PiecewiseLinear { label, .. } => format!("random-pl-{label}"),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::Monomial(k) => t.powi(*k as i32),
            TestFunction::SinPi => (std::f64::consts::PI * t).sin(),
            TestFunction::Bump { c, d } => {
                if t <= *c || t >= *d {
                    return 0.0;
                }
                let half = 0.5 * (d - c);
                ((t - c) * (d - t)).powi(2) / half.powi(4)
            }
            TestFunction::PiecewiseLinear { knots, .. } => {
                let (first, last) = (knots[0], knots[knots.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= t);
                let ((t0, y0), (t1, y1)) = (knots[i - 1], knots[i]);
                y0 + (y1 - y0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestBattery {
    pub functions: Vec<TestFunction>,
}

impl TestBattery {
    /// Monomials up to `t³`, `sin(πt)`, one bump per cell cut out of the
    /// window by the breakpoints, and seeded random piecewise-linear functions.
    pub fn build(cfg: &OracleConfig, breakpoints: &[f64]) -> Self {
        let mut functions: Vec<TestFunction> = (0..4).map(TestFunction::Monomial).collect();
        functions.push(TestFunction::SinPi);

        let mut cuts = vec![cfg.lo];
        cuts.extend(breakpoints.iter().copied().filter(|&p| p > cfg.lo && p < cfg.hi));
        cuts.push(cfg.hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            if w[1] - w[0] > cfg.step() {
                functions.push(TestFunction::Bump { c: w[0], d: w[1] });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for label in 0..RANDOM_FUNCTIONS {
            let knots = (0..RANDOM_KNOTS)
                .map(|k| {
                    let t = cfg.lo + (cfg.hi - cfg.lo) * k as f64 / (RANDOM_KNOTS - 1) as f64;
                    (t, rng.gen_range(-1.0..=1.0))
                })
                .collect();
            functions.push(TestFunction::PiecewiseLinear { label, knots });
        }
        TestBattery { functions }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub function: String,
    pub residual: f64,
    /// Grid point with the largest pointwise gap.
    pub worst_t: Option<f64>,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub residual: f64,
    pub rows: Vec<ResidualRow>,
    pub grid: usize,
    pub retained: usize,
    pub norm: Norm,
}

impl OracleReport {
    /// The row with the largest residual.
    pub fn worst(&self) -> Option<&ResidualRow> {
        self.rows.iter().max_by(|a, b| a.residual.total_cmp(&b.residual))
    }
}

fn discrete_norm(values: &[f64], norm: Norm, h: f64) -> f64 {
    match norm {
        Norm::Inf => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        Norm::One => values.iter().map(|v| v.abs()).sum::<f64>() * h,
        Norm::Two => (values.iter().map(|v| v * v).sum::<f64>() * h).sqrt(),
    }
}

/// `max_x ‖lhs(x) - rhs(x)‖ / (1 + ‖rhs(x)‖)` over the battery.
///
/// Both sides are evaluated by literally nesting the operators, so the
/// closed forms used by the deciders play no part here.
pub fn residual(
    a: &OperatorSpec,
    b: &OperatorSpec,
    f: &Polynomial,
    form: RelationForm,
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    cfg.validate()?;
    let window = cfg.window();
    for op in [a, b] {
        op.validate()?;
        check_window(op, &window)?;
    }
    let (lhs, rhs) = relation_sides(a, b, f, form);
    let mut bps = lhs.breakpoints();
    bps.extend(rhs.breakpoints());
    let points = cfg.grid_points(&bps);
    let battery = TestBattery::build(cfg, &bps);
    let h = cfg.step();

    let rows = battery
        .functions
        .iter()
        .map(|x| {
            let xf = |t: f64| x.eval(t);
            let mut diff = Vec::with_capacity(points.len());
            let mut l_vals = Vec::with_capacity(points.len());
            let mut r_vals = Vec::with_capacity(points.len());
            let (mut worst_t, mut worst) = (None, -1.0);
            for &t in &points {
                let l = lhs.apply(&xf, t);
                let r = rhs.apply(&xf, t);
                let d = l - r;
                if d.abs() > worst {
                    worst = d.abs();
                    worst_t = Some(t);
                }
                diff.push(d);
                l_vals.push(l);
                r_vals.push(r);
            }
            let rhs_norm = discrete_norm(&r_vals, cfg.norm, h);
            ResidualRow {
                function: x.name(),
                residual: discrete_norm(&diff, cfg.norm, h) / (1.0 + rhs_norm),
                worst_t,
                lhs_norm: discrete_norm(&l_vals, cfg.norm, h),
                rhs_norm,
            }
        })
        .collect::<Vec<_>>();
    let residual = rows.iter().fold(0.0, |m: f64, r| m.max(r.residual));
    Ok(OracleReport {
        residual,
        rows,
        grid: cfg.grid,
        retained: points.len(),
        norm: cfg.norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Consistency {
    Consistent,
    Ambiguous,
    Inconsistent,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Consistent => "CONSISTENT",
            Consistency::Ambiguous => "AMBIGUOUS",
            Consistency::Inconsistent => "INCONSISTENT",
        })
    }
}

/// Compares a symbolic status with an oracle residual. Verdicts the oracle
/// cannot refute on its own (`Unknown`, `ConditionalOn`) count as consistent.
pub fn crosscheck(status: Status, r: f64, cfg: &OracleConfig) -> Consistency {
    match status {
        Status::Unknown | Status::ConditionalOn => Consistency::Consistent,
        Status::Holds if r <= cfg.tau_pass => Consistency::Consistent,
        Status::Fails if r >= cfg.tau_fail => Consistency::Consistent,
        _ if r > cfg.tau_pass && r < cfg.tau_fail => Consistency::Ambiguous,
        _ => Consistency::Inconsistent,
    }
}
