//! Finite unions of real intervals with exact endpoint-openness bookkeeping.
//!
//! Openness is carried through every operation so that user partitions such
//! as `[1, 3/2)` survive a round trip, but it never influences [`IntervalSet::measure`]
//! or [`IntervalSet::is_null`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::parse_scalar;

/// Endpoints closer than this (relative to their magnitude) are identified.
pub const ENDPOINT_EPS: f64 = 1e-12;

pub(crate) fn same_point(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= ENDPOINT_EPS * 1f64.max(a.abs()).max(b.abs())
}

/// A single interval. Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if lo > hi {
            return Err(Error::InvalidInterval(format!("lower end {lo} exceeds upper end {hi}")));
        }
        if lo == hi && lo.is_infinite() {
            return Err(Error::InvalidInterval("interval at infinity".into()));
        }
        let iv = Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        };
        if same_point(lo, hi) && !(iv.lo_closed && iv.hi_closed) {
            return Err(Error::InvalidInterval(format!(
                "degenerate interval at {lo} must be closed on both sides"
            )));
        }
        Ok(iv)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, true).expect("valid closed interval")
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false).expect("valid open interval")
    }

    pub fn point(x: f64) -> Self {
        Interval::closed(x, x)
    }

    pub fn real_line() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_point(&self) -> bool {
        same_point(self.lo, self.hi)
    }

    pub fn length(&self) -> f64 {
        if self.is_point() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// A representative interior point (the point itself for degenerate intervals).
    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = if same_point(self.lo, other.lo) {
            (self.lo, self.lo_closed && other.lo_closed)
        } else if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else {
            (other.lo, other.lo_closed)
        };
        let (hi, hi_closed) = if same_point(self.hi, other.hi) {
            (self.hi, self.hi_closed && other.hi_closed)
        } else if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else {
            (other.hi, other.hi_closed)
        };
        if same_point(lo, hi) {
            return (lo_closed && hi_closed && lo.is_finite()).then(|| Interval::point(lo));
        }
        (lo < hi).then_some(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", fmt_endpoint(self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_endpoint(self.lo),
            fmt_endpoint(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Sorted, pairwise-disjoint finite union of intervals.
///
/// Serialized in bracket notation, e.g. `"[1, 1.5) U (2, 3]"`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn real_line() -> Self {
        IntervalSet {
            intervals: vec![Interval::real_line()],
        }
    }

    pub fn point(x: f64) -> Self {
        IntervalSet::from(Interval::point(x))
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        IntervalSet::from(Interval::closed(lo, hi))
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        IntervalSet::from(Interval::open(lo, hi))
    }

    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        Interval::new(lo, hi, lo_closed, hi_closed).map(IntervalSet::from)
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut ivs: Vec<Interval> = intervals.into_iter().collect();
        ivs.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap_or(Ordering::Equal)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            let Some(cur) = out.last_mut() else {
                out.push(iv);
                continue;
            };
            let touches = same_point(iv.lo, cur.hi);
            let overlaps = (iv.lo < cur.hi && !touches) || (touches && (cur.hi_closed || iv.lo_closed));
            if !overlaps {
                out.push(iv);
                continue;
            }
            if same_point(iv.lo, cur.lo) {
                cur.lo_closed |= iv.lo_closed;
            }
            if same_point(iv.hi, cur.hi) {
                cur.hi_closed |= iv.hi_closed;
            } else if iv.hi > cur.hi {
                cur.hi = iv.hi;
                cur.hi_closed = iv.hi_closed;
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure; infinite for unbounded sets.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// True iff the set has measure zero, i.e. only isolated points remain.
    pub fn is_null(&self) -> bool {
        self.intervals.iter().all(Interval::is_point)
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|iv| iv.lo.is_finite() && iv.hi.is_finite())
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(t))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = (&self.intervals[i], &other.intervals[j]);
            if let Some(iv) = a.intersect(b) {
                out.push(iv);
            }
            if a.hi < b.hi || (a.hi == b.hi && !a.hi_closed) {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Complement in the real line.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut lo = f64::NEG_INFINITY;
        let mut lo_closed = false;
        for iv in &self.intervals {
            if let Ok(gap) = Interval::new(lo, iv.lo, lo_closed, !iv.lo_closed) {
                out.push(gap);
            }
            lo = iv.hi;
            lo_closed = !iv.hi_closed;
        }
        if lo < f64::INFINITY {
            if let Ok(tail) = Interval::new(lo, f64::INFINITY, lo_closed, false) {
                out.push(tail);
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// `{ t : slope * t + intercept ∈ self }`.
    pub fn preimage_affine(&self, slope: f64, intercept: f64) -> IntervalSet {
        if slope == 0.0 {
            return if self.contains(intercept) {
                IntervalSet::real_line()
            } else {
                IntervalSet::empty()
            };
        }
        let map = |x: f64| (x - intercept) / slope;
        IntervalSet::from_intervals(self.intervals.iter().filter_map(|iv| {
            let (a, b) = (map(iv.lo), map(iv.hi));
            if slope > 0.0 {
                Interval::new(a, b, iv.lo_closed, iv.hi_closed).ok()
            } else {
                Interval::new(b, a, iv.hi_closed, iv.lo_closed).ok()
            }
        }))
    }

    /// `{ slope * t + intercept : t ∈ self }`.
    pub fn image_affine(&self, slope: f64, intercept: f64) -> IntervalSet {
        if slope == 0.0 {
            return if self.is_empty() {
                IntervalSet::empty()
            } else {
                IntervalSet::point(intercept)
            };
        }
        self.preimage_affine(1.0 / slope, -intercept / slope)
    }

    /// Smallest enclosing `(lo, hi)`, if nonempty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.lo, self.intervals.last()?.hi))
    }

    /// All finite endpoints, ascending, deduplicated.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|x| x.is_finite())
            .collect();
        pts.dedup_by(|a, b| same_point(*a, *b));
        pts
    }

    /// The component of largest length (first one on ties).
    pub fn largest_component(&self) -> Option<Interval> {
        self.intervals
            .iter()
            .copied()
            .reduce(|best, iv| if iv.length() > best.length() { iv } else { best })
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet { intervals: vec![iv] }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " U ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Accepts `[a, b]`, `(a, b)`, the reversed-bracket style `]a, b[`,
    /// mixed forms like `[a, b[`, and `{a}` for a single point.
    fn from_str(src: &str) -> Result<Self> {
        let s = src.trim();
        let bad = || Error::Parse(format!("cannot read interval `{src}`"));
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let x = parse_scalar(inner)?;
            return Interval::new(x, x, true, true);
        }
        let mut chars = s.chars();
        let first = chars.next().ok_or_else(bad)?;
        let last = chars.next_back().ok_or_else(bad)?;
        let lo_closed = match first {
            '[' => true,
            '(' | ']' => false,
            _ => return Err(bad()),
        };
        let hi_closed = match last {
            ']' => true,
            ')' | '[' => false,
            _ => return Err(bad()),
        };
        let body = chars.as_str();
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        Interval::new(parse_scalar(a)?, parse_scalar(b)?, lo_closed, hi_closed)
    }
}

impl From<IntervalSet> for String {
    fn from(s: IntervalSet) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for IntervalSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    /// A union written as intervals joined by `U` (or `∪`); `{}` is empty.
    fn from_str(src: &str) -> Result<Self> {
        let s = src.trim();
        if s == "{}" || s == "∅" || s.is_empty() {
            return Ok(IntervalSet::empty());
        }
        let parts = s
            .split(['U', '∪'])
            .map(str::parse::<Interval>)
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::from_intervals(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    /// Membership on a fine rational grid, independent of the interval code.
    fn brute_members(pred: impl Fn(f64) -> bool) -> Vec<bool> {
        (0..=3000).map(|k| pred(k as f64 / 1000.0)).collect()
    }

    #[test]
    fn partition_intersection_keeps_openness() {
        let g1 = set("[1, 3/2)");
        let h1 = set("[1, 2]");
        assert_eq!(g1.intersect(&h1), set("[1, 1.5)"));
        assert_eq!(g1.intersect(&h1).to_string(), "[1, 1.5)");
    }

    #[test]
    fn empty_absorbs() {
        let s = set("[0,1] U (2,3)");
        assert!(s.intersect(&IntervalSet::empty()).is_empty());
        assert!(IntervalSet::empty().intersect(&s).is_empty());
    }

    #[test]
    fn union_intersection_matches_grid_membership() {
        let a = set("[0,1] U [2,3]");
        let b = set("[0.5, 2.5]");
        let got = a.intersect(&b);
        assert_eq!(got, set("[0.5,1] U [2,2.5]"));
        let expect =
            brute_members(|t| ((0.0..=1.0).contains(&t) || (2.0..=3.0).contains(&t)) && (0.5..=2.5).contains(&t));
        let seen = brute_members(|t| got.contains(t));
        assert_eq!(expect, seen);
    }

    #[test]
    fn nullity() {
        assert!(IntervalSet::empty().is_null());
        assert!(IntervalSet::point(1.0).union(&IntervalSet::point(2.0)).is_null());
        assert!(!IntervalSet::closed(0.0, 1e-9).is_null());
        assert_eq!(IntervalSet::closed(0.0, 1e-9).measure(), 1e-9);
    }

    #[test]
    fn touching_closed_intervals_merge() {
        let s = set("[0,1) U [1,2]");
        assert_eq!(s.intervals().len(), 1);
        let gap = set("[0,1) U (1,2]");
        assert_eq!(gap.intervals().len(), 2);
        assert!(!gap.contains(1.0));
        assert_eq!(gap.measure(), 2.0);
    }

    #[test]
    fn adjacent_closed_ends_meet_in_a_point() {
        let s = set("[0,1]").intersect(&set("[1,2]"));
        assert_eq!(s, IntervalSet::point(1.0));
        assert!(s.is_null());
        assert!(!s.is_empty());
        assert!(set("[0,1)").intersect(&set("[1,2]")).is_empty());
    }

    #[test]
    fn complement_and_difference() {
        let s = set("[0,1) U (2,3]");
        let c = s.complement();
        assert!(c.contains(1.0) && c.contains(2.0) && c.contains(-5.0) && c.contains(3.5));
        assert!(!c.contains(0.0) && !c.contains(3.0));
        let d = set("[0,3]").difference(&s);
        assert_eq!(d, set("[1,2]"));
        assert!(set("[0,3]").difference(&set("[0,3]")).is_empty());
    }

    #[test]
    fn preimage_under_affine_maps() {
        let s = set("[1,2)");
        assert_eq!(s.preimage_affine(2.0, 0.0), set("[0.5,1)"));
        assert_eq!(s.preimage_affine(-1.0, 0.0), set("(-2,-1]"));
        assert_eq!(s.preimage_affine(0.0, 1.5), IntervalSet::real_line());
        assert!(s.preimage_affine(0.0, 2.0).is_empty());
        assert_eq!(s.image_affine(1.0, -1.0), set("[0,1)"));
    }

    #[test]
    fn parses_reversed_bracket_style() {
        assert_eq!(set("]2,3]"), IntervalSet::new(2.0, 3.0, false, true).unwrap());
        assert_eq!(set("[1,3/2["), IntervalSet::new(1.0, 1.5, true, false).unwrap());
        assert_eq!(set("{1}"), IntervalSet::point(1.0));
        assert_eq!(set("(-inf, inf)"), IntervalSet::real_line());
        assert!("[2,1]".parse::<IntervalSet>().is_err());
        assert!("[1,1)".parse::<IntervalSet>().is_err());
        assert!("1,2".parse::<IntervalSet>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["[1, 1.5)", "(0.25, 0.5] U {3}", "{}", "(-inf, 0) U [1, inf)"] {
            let s = set(src);
            assert_eq!(set(&s.to_string()), s);
        }
    }
}
