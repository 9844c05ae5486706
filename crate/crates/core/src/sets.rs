//! Finite unions of open rational intervals, their Fermat extensions, and
//! the intuitionistic transfer operations: exact union, intersection,
//! interior-difference, and quantifier projections over open rectangle
//! relations.
//!
//! Membership of a Fermat real in an extended open set is a standard-part
//! test, so the whole algebra stays decidable over rational endpoints.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::fermat::FermatReal;
use crate::rational::{Rational, Scalar};

/// Interval endpoint: rational or infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Endpoint {
    fn cmp_ep(&self, other: &Endpoint) -> Ordering {
        use Endpoint::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }

    fn min_ep(a: &Endpoint, b: &Endpoint) -> Endpoint {
        if a.cmp_ep(b) == Ordering::Greater {
            b.clone()
        } else {
            a.clone()
        }
    }

    fn max_ep(a: &Endpoint, b: &Endpoint) -> Endpoint {
        if a.cmp_ep(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }
}

/// A nonempty open interval with rational or infinite endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    /// `(lo, hi)`; requires `lo < hi`.
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Interval> {
        if lo.cmp_ep(&hi) != Ordering::Less {
            return Err(Error::Domain {
                op: "Interval::new",
                reason: "need lo < hi".to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Finite open interval over rationals.
    pub fn open(lo: Rational, hi: Rational) -> Result<Interval> {
        Interval::new(Endpoint::Finite(lo), Endpoint::Finite(hi))
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn contains(&self, p: &Rational) -> bool {
        let above = match &self.lo {
            Endpoint::NegInf => true,
            Endpoint::Finite(a) => a < p,
            Endpoint::PosInf => false,
        };
        let below = match &self.hi {
            Endpoint::NegInf => false,
            Endpoint::Finite(b) => p < b,
            Endpoint::PosInf => true,
        };
        above && below
    }

    pub fn contains_f64(&self, p: f64) -> bool {
        let above = match &self.lo {
            Endpoint::NegInf => true,
            Endpoint::Finite(a) => a.to_f64() < p,
            Endpoint::PosInf => false,
        };
        let below = match &self.hi {
            Endpoint::NegInf => false,
            Endpoint::Finite(b) => p < b.to_f64(),
            Endpoint::PosInf => true,
        };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = Endpoint::max_ep(&self.lo, &other.lo);
        let hi = Endpoint::min_ep(&self.hi, &other.hi);
        Interval::new(lo, hi).ok()
    }

    /// True when `self` fits inside `other` (as open sets).
    pub fn within(&self, other: &Interval) -> bool {
        other.lo.cmp_ep(&self.lo) != Ordering::Greater
            && self.hi.cmp_ep(&other.hi) != Ordering::Greater
    }
}

/// Canonical finite union of pairwise-disjoint, non-mergeable open
/// intervals, sorted by left endpoint. Canonical forms are unique, so
/// structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpenSet {
    intervals: Vec<Interval>,
}

impl OpenSet {
    pub fn empty() -> OpenSet {
        OpenSet { intervals: Vec::new() }
    }

    /// The whole line.
    pub fn all() -> OpenSet {
        OpenSet {
            intervals: alloc::vec![Interval { lo: Endpoint::NegInf, hi: Endpoint::PosInf }],
        }
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> OpenSet {
        Self::canonical(intervals)
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<OpenSet> {
        Ok(OpenSet { intervals: alloc::vec![Interval::open(lo, hi)?] })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    fn canonical(mut intervals: Vec<Interval>) -> OpenSet {
        intervals.sort_by(|a, b| a.lo.cmp_ep(&b.lo).then_with(|| a.hi.cmp_ep(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                // Merge only on genuine overlap; touching open intervals
                // like (0,1) and (1,2) stay apart (the point is missing).
                Some(last) if iv.lo.cmp_ep(&last.hi) == Ordering::Less => {
                    last.hi = Endpoint::max_ep(&last.hi, &iv.hi);
                }
                _ => out.push(iv),
            }
        }
        OpenSet { intervals: out }
    }

    pub fn contains(&self, p: &Rational) -> bool {
        self.intervals.iter().any(|iv| iv.contains(p))
    }

    pub fn contains_f64(&self, p: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains_f64(p))
    }

    pub fn union(&self, other: &OpenSet) -> OpenSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Self::canonical(all)
    }

    pub fn intersect(&self, other: &OpenSet) -> OpenSet {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(iv) = a.intersect(b) {
                    out.push(iv);
                }
            }
        }
        Self::canonical(out)
    }

    /// Interior of the set difference: `int(A \ B) = A \ closure(B)`.
    /// Boundary points drop out, e.g. `int((0,3) \ (1,2)) = (0,1) u (2,3)`.
    pub fn int_diff(&self, other: &OpenSet) -> OpenSet {
        let mut current = self.intervals.clone();
        for b in &other.intervals {
            let mut next = Vec::with_capacity(current.len() + 1);
            for a in current {
                // (a.lo, a.hi) minus the closed interval [b.lo, b.hi]:
                // the remainder stays open on the cut sides.
                if let Ok(left) = Interval::new(a.lo.clone(), Endpoint::min_ep(&a.hi, &b.lo)) {
                    next.push(left);
                }
                if let Ok(right) = Interval::new(Endpoint::max_ep(&a.lo, &b.hi), a.hi.clone()) {
                    next.push(right);
                }
            }
            current = next;
        }
        Self::canonical(current)
    }

    /// Exact inclusion of open sets.
    pub fn subset_of(&self, other: &OpenSet) -> bool {
        self.intervals
            .iter()
            .all(|a| other.intervals.iter().any(|b| a.within(b)))
    }

    /// Membership of a Fermat real in the extension of this set: a
    /// standard-part test.
    pub fn member_ext(&self, x: &FermatReal) -> bool {
        match x.st() {
            Scalar::Exact(r) => self.contains(r),
            Scalar::Approx(v) => self.contains_f64(*v),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => write!(f, "-inf"),
            Endpoint::Finite(r) => write!(f, "{r}"),
            Endpoint::PosInf => write!(f, "inf"),
        }
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "u")?;
            }
            write!(f, "({},{})", iv.lo, iv.hi)?;
        }
        Ok(())
    }
}

impl core::str::FromStr for OpenSet {
    type Err = Error;

    /// Parses the `(0,1)u(2,3)` form; `{}` is the empty set.
    fn from_str(s: &str) -> Result<OpenSet> {
        let s = s.trim();
        if s == "{}" {
            return Ok(OpenSet::empty());
        }
        let mut intervals = Vec::new();
        for part in s.split('u') {
            let part = part.trim();
            let inner = part
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| Error::Parse {
                    column: 1,
                    message: format!("expected (lo,hi), got `{part}`"),
                })?;
            let (lo_s, hi_s) = inner.split_once(',').ok_or_else(|| Error::Parse {
                column: 1,
                message: "expected a comma inside the interval".to_string(),
            })?;
            let parse_ep = |t: &str| -> Result<Endpoint> {
                match t.trim() {
                    "-inf" => Ok(Endpoint::NegInf),
                    "inf" | "+inf" => Ok(Endpoint::PosInf),
                    lit => Ok(Endpoint::Finite(lit.parse()?)),
                }
            };
            intervals.push(Interval::new(parse_ep(lo_s)?, parse_ep(hi_s)?)?);
        }
        Ok(OpenSet::canonical(intervals))
    }
}

/// Open rectangle in the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

/// Finite union of open rational rectangles inside `A x B`: the executable
/// class of open binary relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenRelation {
    rects: Vec<Rect>,
}

impl OpenRelation {
    /// Validates that every rectangle lies inside `A x B`.
    pub fn new(rects: Vec<Rect>, a: &OpenSet, b: &OpenSet) -> Result<OpenRelation> {
        for r in &rects {
            let x_ok = a.intervals().iter().any(|iv| r.x.within(iv));
            let y_ok = b.intervals().iter().any(|iv| r.y.within(iv));
            if !x_ok || !y_ok {
                return Err(Error::Domain {
                    op: "OpenRelation::new",
                    reason: "rectangle not contained in A x B".to_string(),
                });
            }
        }
        Ok(OpenRelation { rects })
    }

    /// Unvalidated constructor for callers that already know the bounds.
    pub fn from_rects(rects: Vec<Rect>) -> OpenRelation {
        OpenRelation { rects }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        self.rects.iter().any(|r| r.x.contains(x) && r.y.contains(y))
    }

    /// Domain: union of the x-intervals.
    pub fn dom(&self) -> OpenSet {
        OpenSet::canonical(self.rects.iter().map(|r| r.x.clone()).collect())
    }

    /// Codomain: union of the y-intervals.
    pub fn cod(&self) -> OpenSet {
        OpenSet::canonical(self.rects.iter().map(|r| r.y.clone()).collect())
    }

    /// Existential projection `exists_p(C) = p(C)`: open because projections
    /// of open sets are open.
    pub fn project_exists(&self) -> OpenSet {
        self.dom()
    }

    /// Universal projection by the double-complement formula
    /// `forall_p(C) = int(A \ exists_p(int((A x B) \ C)))`.
    pub fn project_forall(&self, a: &OpenSet, b: &OpenSet) -> OpenSet {
        // int((A x B) \ C) = (A x B) \ closure(C), as a rectangle union.
        let mut pieces: Vec<Rect> = Vec::new();
        for ax in a.intervals() {
            for by in b.intervals() {
                pieces.push(Rect { x: ax.clone(), y: by.clone() });
            }
        }
        for c in &self.rects {
            let mut next: Vec<Rect> = Vec::new();
            for piece in pieces {
                // Complement of a closed box: four open half-planes.
                let candidates = [
                    Interval::new(piece.x.lo.clone(), Endpoint::min_ep(&piece.x.hi, &c.x.lo))
                        .ok()
                        .map(|x| Rect { x, y: piece.y.clone() }),
                    Interval::new(Endpoint::max_ep(&piece.x.lo, &c.x.hi), piece.x.hi.clone())
                        .ok()
                        .map(|x| Rect { x, y: piece.y.clone() }),
                    Interval::new(piece.y.lo.clone(), Endpoint::min_ep(&piece.y.hi, &c.y.lo))
                        .ok()
                        .map(|y| Rect { x: piece.x.clone(), y }),
                    Interval::new(Endpoint::max_ep(&piece.y.lo, &c.y.hi), piece.y.hi.clone())
                        .ok()
                        .map(|y| Rect { x: piece.x.clone(), y }),
                ];
                for cand in candidates.into_iter().flatten() {
                    if !next.contains(&cand) {
                        next.push(cand);
                    }
                }
            }
            pieces = next;
        }
        let exists_complement =
            OpenSet::canonical(pieces.into_iter().map(|r| r.x).collect());
        a.int_diff(&exists_complement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> OpenSet {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_union() {
        // touching open intervals do not merge
        assert_eq!(set("(0,1)").union(&set("(1,2)")), set("(0,1)u(1,2)"));
        // overlapping ones do
        assert_eq!(set("(0,2)").union(&set("(1,3)")), set("(0,3)"));
        assert_eq!(set("(0,1)").intersect(&set("(2,3)")), OpenSet::empty());
    }

    #[test]
    fn interior_difference() {
        assert_eq!(set("(0,3)").int_diff(&set("(1,2)")), set("(0,1)u(2,3)"));
        assert_eq!(set("(0,1)").int_diff(&set("(0,1)")), OpenSet::empty());
        assert_eq!(set("(-inf,0)").int_diff(&set("(-1,0)")), set("(-inf,-1)"));
    }

    #[test]
    fn membership_is_standard_part() {
        let dt = FermatReal::dt(Rational::one()).unwrap();
        let x = FermatReal::from_int(1) + dt.clone();
        assert!(set("(0,2)").member_ext(&x));
        // st(dt) = 0 is not in the open (0,1)
        assert!(!set("(0,1)").member_ext(&dt));
        assert!(!set("(0,2)").member_ext(&FermatReal::from_int(5)));
    }

    #[test]
    fn text_round_trip() {
        for s in ["(0,1)u(2,3)", "(-inf,0)", "{}", "(1/2,3/2)"] {
            assert_eq!(set(s).to_string(), s);
        }
    }

    #[test]
    fn projections() {
        let a = set("(0,2)");
        let b = set("(0,1)");
        let unit = Rect {
            x: Interval::open(Rational::zero(), Rational::one()).unwrap(),
            y: Interval::open(Rational::zero(), Rational::one()).unwrap(),
        };
        let c = OpenRelation::new(alloc::vec![unit], &a, &b).unwrap();
        assert_eq!(c.project_exists(), set("(0,1)"));
        // forall: a in (0,2) such that all b in (0,1) pair into C -> (0,1)
        assert_eq!(c.project_forall(&a, &b), set("(0,1)"));

        let two = OpenRelation::from_rects(alloc::vec![
            Rect {
                x: Interval::open(Rational::zero(), Rational::one()).unwrap(),
                y: Interval::open(Rational::zero(), Rational::one()).unwrap(),
            },
            Rect {
                x: Interval::open(Rational::from_int(2), Rational::from_int(3)).unwrap(),
                y: Interval::open(Rational::from_int(5), Rational::from_int(6)).unwrap(),
            },
        ]);
        assert_eq!(two.project_exists(), set("(0,1)u(2,3)"));
    }

    #[test]
    fn subset_checks() {
        assert!(set("(0,1)").subset_of(&set("(-1,2)")));
        assert!(!set("(0,2)").subset_of(&set("(0,1)u(1,2)")));
        assert!(set("(0,1)u(1,2)").subset_of(&set("(0,2)")));
    }
}
