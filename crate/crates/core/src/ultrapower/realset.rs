//! Finite unions of rational intervals with open/closed endpoint flags:
//! the subsets of the line whose star-extension membership is decidable
//! for symbolic sequences.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::epset::EpSet;
use super::seq::SeqExpr;

/// Lower bound of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lower {
    NegInf,
    /// Value plus inclusiveness.
    At(Rational, bool),
}

/// Upper bound of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Upper {
    At(Rational, bool),
    PosInf,
}

impl Lower {
    /// Orders lower bounds by the points they admit: `[a` comes before `(a`.
    fn key_cmp(&self, other: &Lower) -> Ordering {
        match (self, other) {
            (Lower::NegInf, Lower::NegInf) => Ordering::Equal,
            (Lower::NegInf, _) => Ordering::Less,
            (_, Lower::NegInf) => Ordering::Greater,
            (Lower::At(a, ac), Lower::At(b, bc)) => {
                a.cmp(b).then_with(|| bc.cmp(ac))
            }
        }
    }

    fn admits(&self, p: &Rational) -> bool {
        match self {
            Lower::NegInf => true,
            Lower::At(a, closed) => {
                if *closed {
                    a <= p
                } else {
                    a < p
                }
            }
        }
    }

    /// The more restrictive of two lower bounds.
    fn tighter(&self, other: &Lower) -> Lower {
        match (self, other) {
            (Lower::NegInf, b) => b.clone(),
            (a, Lower::NegInf) => a.clone(),
            (Lower::At(a, ac), Lower::At(b, bc)) => match a.cmp(b) {
                Ordering::Less => Lower::At(b.clone(), *bc),
                Ordering::Greater => Lower::At(a.clone(), *ac),
                Ordering::Equal => Lower::At(a.clone(), *ac && *bc),
            },
        }
    }
}

impl Upper {
    fn admits(&self, p: &Rational) -> bool {
        match self {
            Upper::PosInf => true,
            Upper::At(b, closed) => {
                if *closed {
                    p <= b
                } else {
                    p < b
                }
            }
        }
    }

    fn tighter(&self, other: &Upper) -> Upper {
        match (self, other) {
            (Upper::PosInf, b) => b.clone(),
            (a, Upper::PosInf) => a.clone(),
            (Upper::At(a, ac), Upper::At(b, bc)) => match a.cmp(b) {
                Ordering::Less => Upper::At(a.clone(), *ac),
                Ordering::Greater => Upper::At(b.clone(), *bc),
                Ordering::Equal => Upper::At(a.clone(), *ac && *bc),
            },
        }
    }

    /// The looser of two upper bounds (for merging).
    fn looser(&self, other: &Upper) -> Upper {
        match (self, other) {
            (Upper::PosInf, _) | (_, Upper::PosInf) => Upper::PosInf,
            (Upper::At(a, ac), Upper::At(b, bc)) => match a.cmp(b) {
                Ordering::Less => Upper::At(b.clone(), *bc),
                Ordering::Greater => Upper::At(a.clone(), *ac),
                Ordering::Equal => Upper::At(a.clone(), *ac || *bc),
            },
        }
    }
}

/// One interval with flagged endpoints; may be a single point `[a,a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Lower,
    pub hi: Upper,
}

impl RealInterval {
    fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Lower::At(a, ac), Upper::At(b, bc)) => match a.cmp(b) {
                Ordering::Greater => true,
                Ordering::Equal => !(*ac && *bc),
                Ordering::Less => false,
            },
            _ => false,
        }
    }

    fn contains(&self, p: &Rational) -> bool {
        self.lo.admits(p) && self.hi.admits(p)
    }

    /// Whether `self` and `next` (sorted by lower bound) form one connected
    /// piece.
    fn touches(&self, next: &RealInterval) -> bool {
        match (&self.hi, &next.lo) {
            (Upper::PosInf, _) => true,
            (_, Lower::NegInf) => true,
            (Upper::At(h, hc), Lower::At(l, lc)) => match l.cmp(h) {
                Ordering::Less => true,
                Ordering::Equal => *hc || *lc,
                Ordering::Greater => false,
            },
        }
    }
}

/// Canonical finite union of flagged intervals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RealSet {
    intervals: Vec<RealInterval>,
}

impl RealSet {
    pub fn empty() -> RealSet {
        RealSet { intervals: Vec::new() }
    }

    pub fn all() -> RealSet {
        RealSet::from_intervals(alloc::vec![RealInterval {
            lo: Lower::NegInf,
            hi: Upper::PosInf,
        }])
    }

    /// Single point `{a}`.
    pub fn singleton(a: Rational) -> RealSet {
        RealSet::from_intervals(alloc::vec![RealInterval {
            lo: Lower::At(a.clone(), true),
            hi: Upper::At(a, true),
        }])
    }

    /// Bounded interval with the given inclusiveness flags.
    pub fn interval(
        lo: Rational,
        lo_closed: bool,
        hi: Rational,
        hi_closed: bool,
    ) -> RealSet {
        RealSet::from_intervals(alloc::vec![RealInterval {
            lo: Lower::At(lo, lo_closed),
            hi: Upper::At(hi, hi_closed),
        }])
    }

    /// Open bounded interval.
    pub fn open(lo: Rational, hi: Rational) -> RealSet {
        Self::interval(lo, false, hi, false)
    }

    /// `[a, +inf)` or `(a, +inf)`.
    pub fn ray_from(a: Rational, closed: bool) -> RealSet {
        RealSet::from_intervals(alloc::vec![RealInterval {
            lo: Lower::At(a, closed),
            hi: Upper::PosInf,
        }])
    }

    pub fn from_intervals(intervals: Vec<RealInterval>) -> RealSet {
        Self::canonical(intervals)
    }

    fn canonical(mut intervals: Vec<RealInterval>) -> RealSet {
        intervals.retain(|iv| !iv.is_empty());
        intervals.sort_by(|a, b| a.lo.key_cmp(&b.lo));
        let mut out: Vec<RealInterval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                Some(last) if last.touches(&iv) => {
                    last.hi = last.hi.looser(&iv.hi);
                }
                _ => out.push(iv),
            }
        }
        RealSet { intervals: out }
    }

    pub fn intervals(&self) -> &[RealInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, p: &Rational) -> bool {
        self.intervals.iter().any(|iv| iv.contains(p))
    }

    pub fn union(&self, other: &RealSet) -> RealSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Self::canonical(all)
    }

    pub fn intersect(&self, other: &RealSet) -> RealSet {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                out.push(RealInterval {
                    lo: a.lo.tighter(&b.lo),
                    hi: a.hi.tighter(&b.hi),
                });
            }
        }
        Self::canonical(out)
    }

    pub fn complement(&self) -> RealSet {
        let mut out = Vec::new();
        let mut cursor = Lower::NegInf;
        for iv in &self.intervals {
            if let Lower::At(a, closed) = &iv.lo {
                out.push(RealInterval {
                    lo: cursor.clone(),
                    hi: Upper::At(a.clone(), !closed),
                });
            }
            cursor = match &iv.hi {
                Upper::PosInf => return Self::canonical(out),
                Upper::At(b, closed) => Lower::At(b.clone(), !closed),
            };
        }
        out.push(RealInterval { lo: cursor, hi: Upper::PosInf });
        Self::canonical(out)
    }

    pub fn difference(&self, other: &RealSet) -> RealSet {
        self.intersect(&other.complement())
    }

    pub fn subset_of(&self, other: &RealSet) -> bool {
        self.difference(other).is_empty()
    }

    /// The exact index set `{n | x_n in self}` of a symbolic sequence.
    pub fn membership_set(&self, x: &SeqExpr) -> EpSet {
        let mut out = EpSet::empty();
        for iv in &self.intervals {
            let lower = match &iv.lo {
                Lower::NegInf => EpSet::full(),
                Lower::At(a, closed) => {
                    let shifted = x.sub(&SeqExpr::constant(a.clone()));
                    if *closed {
                        shifted.sign_set(|s| s >= 0)
                    } else {
                        shifted.sign_set(|s| s > 0)
                    }
                }
            };
            let upper = match &iv.hi {
                Upper::PosInf => EpSet::full(),
                Upper::At(b, closed) => {
                    let shifted = x.sub(&SeqExpr::constant(b.clone()));
                    if *closed {
                        shifted.sign_set(|s| s <= 0)
                    } else {
                        shifted.sign_set(|s| s < 0)
                    }
                }
            };
            out = out.union(&lower.intersect(&upper));
        }
        out
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "u")?;
            }
            match (&iv.lo, &iv.hi) {
                (Lower::At(a, true), Upper::At(b, true)) if a == b => {
                    write!(f, "{{{a}}}")?;
                    continue;
                }
                _ => {}
            }
            match &iv.lo {
                Lower::NegInf => write!(f, "(-inf,")?,
                Lower::At(a, closed) => write!(f, "{}{a},", if *closed { '[' } else { '(' })?,
            }
            match &iv.hi {
                Upper::PosInf => write!(f, "inf)")?,
                Upper::At(b, closed) => write!(f, "{b}{}", if *closed { ']' } else { ')' })?,
            }
        }
        Ok(())
    }
}

/// Parses a single flagged interval like `(0,1]`, `[2,2]`, `{3}`,
/// `(-inf,0)`; used by the command-line surface.
pub fn parse_real_interval(s: &str) -> Result<RealSet> {
    let s = s.trim();
    let bad = |msg: &str| Error::Parse { column: 1, message: msg.to_string() };
    if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        return Ok(RealSet::singleton(inner.trim().parse()?));
    }
    let mut chars = s.chars();
    let open = chars.next().ok_or_else(|| bad("empty interval"))?;
    let close = s.chars().last().ok_or_else(|| bad("empty interval"))?;
    let lo_closed = match open {
        '[' => true,
        '(' => false,
        _ => return Err(bad("expected [ or (")),
    };
    let hi_closed = match close {
        ']' => true,
        ')' => false,
        _ => return Err(bad("expected ] or )")),
    };
    let inner = &s[1..s.len() - 1];
    let (lo_s, hi_s) = inner.split_once(',').ok_or_else(|| bad("expected a comma"))?;
    let lo = match lo_s.trim() {
        "-inf" => Lower::NegInf,
        lit => Lower::At(lit.parse()?, lo_closed),
    };
    let hi = match hi_s.trim() {
        "inf" | "+inf" => Upper::PosInf,
        lit => Upper::At(lit.parse()?, hi_closed),
    };
    Ok(RealSet::from_intervals(alloc::vec![RealInterval { lo, hi }]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrapower::powersum::PowerSum;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn canonical_merging_with_flags() {
        // (0,1] u (1,2) merges; (0,1) u (1,2) does not.
        let a = RealSet::interval(r(0, 1), false, r(1, 1), true)
            .union(&RealSet::open(r(1, 1), r(2, 1)));
        assert_eq!(a.intervals().len(), 1);
        let b = RealSet::open(r(0, 1), r(1, 1)).union(&RealSet::open(r(1, 1), r(2, 1)));
        assert_eq!(b.intervals().len(), 2);
        // a point plugs the hole
        let c = b.union(&RealSet::singleton(r(1, 1)));
        assert_eq!(c.intervals().len(), 1);
    }

    #[test]
    fn complement_flips_flags() {
        let s = RealSet::interval(r(0, 1), true, r(1, 1), false); // [0,1)
        let c = s.complement();
        assert!(c.contains(&r(-1, 1)));
        assert!(!c.contains(&r(0, 1)));
        assert!(c.contains(&r(1, 1)));
        assert_eq!(s.complement().complement(), s);
        assert!(RealSet::all().complement().is_empty());
    }

    #[test]
    fn boolean_ops_pointwise() {
        let a = RealSet::open(r(0, 1), r(2, 1));
        let b = RealSet::interval(r(1, 1), true, r(3, 1), true);
        let samples = [r(-1, 1), r(0, 1), r(1, 2), r(1, 1), r(3, 2), r(2, 1), r(3, 1)];
        for p in &samples {
            assert_eq!(a.union(&b).contains(p), a.contains(p) || b.contains(p));
            assert_eq!(a.intersect(&b).contains(p), a.contains(p) && b.contains(p));
            assert_eq!(a.difference(&b).contains(p), a.contains(p) && !b.contains(p));
        }
        assert!(a.intersect(&b).subset_of(&a));
    }

    #[test]
    fn membership_sets() {
        // x_n = 1/(n+1): in (0,1) for n >= 1, in {0} never.
        let x = SeqExpr::from_power_sum(PowerSum::reciprocal_power(
            Rational::one(),
            Rational::one(),
        ));
        let in_unit = RealSet::open(r(0, 1), r(1, 1)).membership_set(&x);
        assert_eq!(in_unit, EpSet::from_threshold(1));
        assert!(RealSet::singleton(r(0, 1)).membership_set(&x).is_empty());
        // constant 2 in (0,3): everywhere.
        let two = SeqExpr::constant(r(2, 1));
        assert_eq!(
            RealSet::open(r(0, 1), r(3, 1)).membership_set(&two),
            EpSet::full()
        );
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(RealSet::singleton(r(3, 1)).to_string(), "{3}");
        assert_eq!(
            RealSet::interval(r(0, 1), false, r(1, 1), true).to_string(),
            "(0,1]"
        );
        let parsed = parse_real_interval("(0,1]").unwrap();
        assert_eq!(parsed, RealSet::interval(r(0, 1), false, r(1, 1), true));
        assert_eq!(parse_real_interval("{3}").unwrap(), RealSet::singleton(r(3, 1)));
    }
}
