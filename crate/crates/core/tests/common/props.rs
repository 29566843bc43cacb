//! Invariants shared by the property tests and the acceptance run. Every
//! runner starts from the same seed, so a failure reproduces exactly.

use std::f64::consts::PI;
use std::fmt::Debug;

use covarkit::criteria::{check_mult_mult, check_pointeval_mult, pointeval_mult_rule, Status};
use covarkit::funcalg::{AtomicExpr, Interval, IntervalSet, Piece, PiecewiseExpr};
use covarkit::operators::{iterate, relation_sides, AffineMap, OperatorSpec, Polynomial, RelationForm};
use covarkit::oracle::{residual, OracleConfig, TestBattery};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: [u8; 32] = *b"covarkit property suite seed 01!";

pub type Outcome = Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn run<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S: Strategy,
    S::Value: Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(e: impl ToString) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn window() -> IntervalSet {
    IntervalSet::closed(-2.0, 2.0)
}

fn eighth(k: i32) -> f64 {
    k as f64 / 8.0
}

pub fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((-16i32..=16, 0i32..=8, any::<bool>(), any::<bool>()), 0..4).prop_map(|raw| {
        IntervalSet::from_intervals(raw.into_iter().map(|(lo, len, lc, hc)| {
            if len == 0 {
                Interval::point(eighth(lo))
            } else {
                Interval::new(eighth(lo), eighth(lo + len), lc, hc).unwrap()
            }
        }))
    })
}

fn polynomial(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_len).prop_map(Polynomial::new)
}

fn atomic(trig: bool) -> BoxedStrategy<AtomicExpr> {
    let poly = polynomial(3).prop_map(AtomicExpr::poly);
    if !trig {
        return poly.boxed();
    }
    let sinusoid = (polynomial(2), prop_oneof![Just(1.0), Just(PI), Just(2.0)], -1.0f64..1.0)
        .prop_map(|(w, omega, phase)| AtomicExpr::sinusoid(w, omega, phase));
    prop_oneof![poly, sinusoid].boxed()
}

/// Cells of `[-2,2]` cut at multiples of 1/8.
fn cells(cuts: Vec<i32>) -> Vec<IntervalSet> {
    let mut pts: Vec<f64> = cuts.into_iter().map(eighth).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = vec![-2.0];
    edges.extend(pts);
    edges.push(2.0);
    let n = edges.len() - 1;
    (0..n)
        .map(|i| IntervalSet::new(edges[i], edges[i + 1], true, i + 1 == n).unwrap())
        .collect()
}

pub fn piecewise(trig: bool) -> BoxedStrategy<PiecewiseExpr> {
    (
        prop::collection::vec(-15i32..=15, 0..3),
        prop::collection::vec(prop::option::weighted(0.8, atomic(trig)), 3),
    )
        .prop_map(|(cuts, exprs)| {
            let pieces = cells(cuts)
                .into_iter()
                .zip(exprs)
                .filter_map(|(domain, e)| e.map(|expr| Piece { domain, expr }))
                .collect();
            PiecewiseExpr::new(pieces).unwrap()
        })
        .boxed()
}

fn operator() -> BoxedStrategy<OperatorSpec> {
    let mult = piecewise(false).prop_map(|weight| OperatorSpec::Mult { weight });
    let pw = (
        prop::collection::vec(-15i32..=15, 0..3),
        prop::collection::vec(-2.0f64..2.0, 4),
        piecewise(false),
    )
        .prop_map(|(cuts, alphas, weight)| {
            let parts = cells(cuts);
            OperatorSpec::PiecewiseMult {
                alphas: alphas[..parts.len()].to_vec(),
                weight,
                parts,
            }
        });
    let wc =
        (piecewise(false), -1.0f64..1.0, -1.0f64..1.0).prop_map(|(weight, s, c)| OperatorSpec::WeightedComposition {
            weight,
            map: AffineMap::new(s, c),
        });
    let pe = (piecewise(false), -2.0f64..2.0).prop_map(|(weight, gamma)| OperatorSpec::PointEval { weight, gamma });
    let td =
        (-2.0f64..2.0, -1.0f64..1.0, 0.25f64..2.0).prop_map(|(alpha, shift, scale)| OperatorSpec::TranslateDilate {
            alphas: vec![alpha],
            parts: Vec::new(),
            shift,
            scale,
        });
    prop_oneof![mult, pw, wc, pe, td].boxed()
}

fn nested(op: &OperatorSpec, m: usize, x: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    if m == 0 {
        return x(t);
    }
    op.apply(&|s| nested(op, m - 1, x, s), t)
}

fn random_points(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

pub fn intersect_laws() -> Outcome {
    run(256, (interval_set(), interval_set(), interval_set()), |(a, b, c)| {
        let ab = a.intersect(&b);
        prop_assert_eq!(&ab, &b.intersect(&a));
        prop_assert_eq!(ab.intersect(&c), a.intersect(&b.intersect(&c)));
        prop_assert_eq!(&a.intersect(&a), &a);
        prop_assert!(ab.measure() <= a.measure().min(b.measure()) + 1e-12);
        let u = a.union(&b);
        prop_assert!((u.measure() + ab.measure() - a.measure() - b.measure()).abs() <= 1e-12);
        // membership on a grid that contains every endpoint
        for k in -40..=40 {
            let t = k as f64 / 16.0;
            prop_assert_eq!(ab.contains(t), a.contains(t) && b.contains(t), "t = {}", t);
            prop_assert_eq!(u.contains(t), a.contains(t) || b.contains(t), "t = {}", t);
        }
        Ok(())
    })
}

pub fn support_inclusion() -> Outcome {
    run(256, (piecewise(true), piecewise(false)), |(f, g)| {
        let w = window();
        let fg = f.mul(&g).map_err(fail)?;
        let s = fg.support(&w);
        let both = f.support(&w).intersect(&g.support(&w));
        prop_assert!(s.difference(&both).is_null(), "supp fg = {} ⊄ {}", s, both);
        prop_assert!(both.difference(&s).is_null(), "supp fg = {} misses part of {}", s, both);
        Ok(())
    })
}

pub fn add_pointwise() -> Outcome {
    run(64, (piecewise(true), piecewise(true), any::<u64>()), |(f, g, seed)| {
        let sum = f.add(&g);
        for t in random_points(seed, 1000) {
            let (x, y) = (f.eval(t), g.eval(t));
            prop_assert!(
                (sum.eval(t) - (x + y)).abs() <= 1e-12 * (1.0 + x.abs() + y.abs()),
                "t = {}",
                t
            );
        }
        Ok(())
    })
}

pub fn poly_compose_pointwise() -> Outcome {
    run(128, (polynomial(4), piecewise(false), any::<u64>()), |(p, f, seed)| {
        let composed = f.poly_compose(&p).map_err(fail)?;
        for t in random_points(seed, 200) {
            let want = p.eval(f.eval(t));
            prop_assert!(
                (composed.eval(t) - want).abs() <= 1e-10 * (1.0 + want.abs()),
                "t = {}",
                t
            );
        }
        Ok(())
    })
}

pub fn power_nesting() -> Outcome {
    let x_coeffs = prop::collection::vec(-1.0f64..1.0, 3);
    run(
        192,
        (operator(), 1usize..=4, x_coeffs, any::<u64>()),
        |(op, m, c, seed)| {
            let x = |t: f64| c[0] + c[1] * t + c[2] * (PI * t).sin();
            let pow = op.power(m).map_err(fail)?;
            for t in random_points(seed, 20) {
                let want = nested(&op, m, &x, t);
                let got = pow.apply(&x, t);
                prop_assert!(
                    (got - want).abs() <= 1e-10 * (1.0 + want.abs()),
                    "t = {}: {} vs {}",
                    t,
                    got,
                    want
                );
            }
            Ok(())
        },
    )
}

pub fn affine_iteration() -> Outcome {
    run(256, (-2.0f64..2.0, -2.0f64..2.0, 0u32..6, 0u32..6), |(s, c, m, k)| {
        let map = AffineMap::new(s, c);
        let joined = iterate(&map, m + k);
        let split = iterate(&map, m).after(&iterate(&map, k));
        let tol = |x: f64| 1e-12 * (1.0 + x.abs());
        prop_assert!((joined.slope - split.slope).abs() <= tol(joined.slope));
        prop_assert!((joined.intercept - split.intercept).abs() <= tol(joined.intercept));
        // against plain repeated application
        let t = 0.375;
        let stepped = (0..m + k).fold(t, |acc, _| map.apply(acc));
        prop_assert!((joined.apply(t) - stepped).abs() <= tol(stepped));
        Ok(())
    })
}

pub fn commuting_multiplications() -> Outcome {
    run(64, piecewise(true), |a| {
        let op = OperatorSpec::Mult { weight: a };
        let mut cfg = OracleConfig::new(-2.0, 2.0);
        cfg.grid = 512;
        for form in [RelationForm::AbBfa, RelationForm::BaFab] {
            let r = residual(&op, &op, &Polynomial::identity(), form, &cfg).map_err(fail)?;
            prop_assert!(r.residual <= 1e-12, "{}", r.residual);
        }
        // the sides are built from the literal products
        let (lhs, rhs) = relation_sides(&op, &op, &Polynomial::identity(), RelationForm::AbBfa);
        prop_assert_eq!(lhs.terms.len(), 1);
        prop_assert_eq!(rhs.terms.len(), 1);
        Ok(())
    })
}

pub fn scale_covariance() -> Outcome {
    let scale = prop_oneof![0.1f64..10.0, -10.0f64..-0.1];
    run(
        256,
        (piecewise(false), piecewise(true), polynomial(4), scale),
        |(a, b, f, c)| {
            let w = window();
            let v = check_mult_mult(&a, &b, &f, &w);
            let scaled = check_mult_mult(&a, &b.scale(c), &f, &w);
            prop_assert_eq!(v.status, scaled.status);
            Ok(())
        },
    )
}

pub fn pointeval_cases_match_rule() -> Outcome {
    let strat = (
        polynomial(3),
        polynomial(3),
        -1.0f64..1.0,
        any::<bool>(),
        any::<bool>(),
        polynomial(4),
        any::<bool>(),
    );
    run(256, strat, |(pa, pb, gamma, zero_a, zero_b, f, zero_d0)| {
        let pin = |p: Polynomial, zero: bool| {
            let p = if zero {
                p.sub(&Polynomial::constant(p.eval(gamma)))
            } else {
                p
            };
            PiecewiseExpr::global(AtomicExpr::poly(p))
        };
        let (a, b) = (pin(pa, zero_a), pin(pb, zero_b));
        let mut coeffs = f.coeffs().to_vec();
        if zero_d0 {
            coeffs[0] = 0.0;
        }
        let f = Polynomial::new(coeffs);
        let w = IntervalSet::closed(-1.0, 1.0);
        let v = check_pointeval_mult(&a, gamma, &b, &f, &w).map_err(fail)?;
        let rule = pointeval_mult_rule(&a, gamma, &b, &f, &w);
        prop_assert!(matches!(v.status, Status::Holds | Status::Fails), "{}", v);
        prop_assert_eq!(v.status == Status::Holds, rule, "{}", v);
        Ok(())
    })
}

pub fn breakpoint_exclusion() -> Outcome {
    let strat = (
        -4.0f64..0.0,
        0.5f64..8.0,
        8usize..2048,
        prop::collection::vec(-5.0f64..9.0, 0..8),
        any::<u64>(),
    );
    run(128, strat, |(lo, len, grid, bps, seed)| {
        let mut cfg = OracleConfig::new(lo, lo + len);
        cfg.grid = grid;
        cfg.seed = seed;
        let h = cfg.step();
        let pts = cfg.grid_points(&bps);
        let mut reversed = bps.clone();
        reversed.reverse();
        prop_assert_eq!(&pts, &cfg.grid_points(&reversed));
        let brute: Vec<f64> = (0..grid)
            .map(|k| lo + (k as f64 + 0.5) * h)
            .filter(|t| bps.iter().all(|p| (p - t).abs() >= 0.5 * h))
            .collect();
        prop_assert_eq!(&pts, &brute);

        let battery = TestBattery::build(&cfg, &bps);
        prop_assert_eq!(&battery, &TestBattery::build(&cfg, &bps));
        let mut other = cfg.clone();
        other.seed = seed.wrapping_add(1);
        prop_assert_ne!(&battery, &TestBattery::build(&other, &bps));
        Ok(())
    })
}

pub fn oracle_determinism() -> Outcome {
    run(32, (piecewise(true), piecewise(false), polynomial(3)), |(a, b, f)| {
        let (a, b) = (OperatorSpec::Mult { weight: a }, OperatorSpec::Mult { weight: b });
        let mut cfg = OracleConfig::new(-2.0, 2.0);
        cfg.grid = 512;
        let first = residual(&a, &b, &f, RelationForm::AbBfa, &cfg);
        let second = residual(&a, &b, &f, RelationForm::AbBfa, &cfg);
        prop_assert_eq!(first.map_err(fail)?, second.map_err(fail)?);
        Ok(())
    })
}

pub type Property = (&'static str, fn() -> Outcome);

pub const ALL: &[Property] = &[
    ("intersect laws", intersect_laws),
    ("support algebra inclusion", support_inclusion),
    ("pointwise addition", add_pointwise),
    ("polynomial composition", poly_compose_pointwise),
    ("power nesting equivalence", power_nesting),
    ("affine iteration composition law", affine_iteration),
    ("commuting multiplications", commuting_multiplications),
    ("scale covariance", scale_covariance),
    ("point evaluation cases", pointeval_cases_match_rule),
    ("breakpoint exclusion determinism", breakpoint_exclusion),
    ("oracle determinism", oracle_determinism),
];
