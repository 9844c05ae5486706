//! Elements of the quotient ring: symbolic Cauchy sequences up to
//! oracle-dominant agreement, with pointwise ring operations, the total
//! order, polynomial star-extension, set membership and open-rectangle
//! relations.
//!
//! A `Hyper` stores one representative. Equality and order are relative to
//! a filter oracle, so they are free functions taking `&mut FilterOracle`
//! rather than trait impls.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sets::{Endpoint, Interval, OpenRelation, OpenSet};

use super::epset::EpSet;
use super::oracle::FilterOracle;
use super::powersum::PowerSum;
use super::realset::RealSet;
use super::seq::SeqExpr;

/// Element of the ultrapower ring, as a representative sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyper {
    seq: SeqExpr,
}

impl Hyper {
    pub fn from_seq(seq: SeqExpr) -> Hyper {
        Hyper { seq }
    }

    /// Embeds a real as a constant sequence.
    pub fn constant(c: Rational) -> Hyper {
        Hyper { seq: SeqExpr::constant(c) }
    }

    pub fn zero() -> Hyper {
        Self::constant(Rational::zero())
    }

    /// The class of `(1/(n+1))`, the basic positive infinitesimal.
    pub fn reciprocal() -> Hyper {
        Hyper {
            seq: SeqExpr::from_power_sum(PowerSum::reciprocal_power(
                Rational::one(),
                Rational::one(),
            )),
        }
    }

    pub fn seq(&self) -> &SeqExpr {
        &self.seq
    }

    pub fn add(&self, other: &Hyper) -> Hyper {
        Hyper { seq: self.seq.add(&other.seq) }
    }

    pub fn sub(&self, other: &Hyper) -> Hyper {
        Hyper { seq: self.seq.sub(&other.seq) }
    }

    pub fn mul(&self, other: &Hyper) -> Hyper {
        Hyper { seq: self.seq.mul(&other.seq) }
    }

    pub fn neg(&self) -> Hyper {
        Hyper { seq: self.seq.neg() }
    }

    /// Standard part: the limit of the representative, exactly.
    pub fn st(&self) -> Rational {
        self.seq.limit().clone()
    }
}

/// Equality modulo the oracle: the agreement set must be dominant.
pub fn hyper_eq(oracle: &mut FilterOracle, x: &Hyper, y: &Hyper) -> bool {
    let d = x.seq.sub(&y.seq);
    oracle.dominant(&d.sign_set(|s| s == 0))
}

/// Order modulo the oracle: `x <= y` iff `{n | x_n <= y_n}` is dominant.
/// Total by the complement dichotomy.
pub fn hyper_le(oracle: &mut FilterOracle, x: &Hyper, y: &Hyper) -> bool {
    let d = x.seq.sub(&y.seq);
    oracle.dominant(&d.sign_set(|s| s <= 0))
}

pub fn hyper_lt(oracle: &mut FilterOracle, x: &Hyper, y: &Hyper) -> bool {
    !hyper_le(oracle, y, x)
}

/// Standard part (the limit functional).
pub fn st_hyper(x: &Hyper) -> Rational {
    x.st()
}

/// Infinitesimality by the interval test `-1/k < x < 1/k` for
/// `k = 1..=k_max`; agrees with `st x = 0` (checked).
pub fn is_infinitesimal_hyper(oracle: &mut FilterOracle, x: &Hyper, k_max: u32) -> bool {
    let mut bounded = true;
    for k in 1..=k_max.max(1) {
        let bound = Hyper::constant(Rational::new(1, k as i64));
        if !(hyper_lt(oracle, &bound.neg(), x) && hyper_lt(oracle, x, &bound)) {
            bounded = false;
            break;
        }
    }
    debug_assert_eq!(bounded, x.st().is_zero(), "interval test must match a null limit");
    bounded
}

/// Pseudo-metric `|st x - st y|`; collapses infinitesimally close elements.
pub fn pseudo_distance_hyper(x: &Hyper, y: &Hyper) -> Rational {
    (x.st() - y.st()).abs()
}

/// Multivariate polynomial with rational coefficients, in canonical form
/// (sorted exponent vectors, merged, zero coefficients dropped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    monomials: Vec<(Rational, Vec<u32>)>,
}

impl Poly {
    pub fn new(monomials: Vec<(Rational, Vec<u32>)>) -> Poly {
        let width = monomials.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut padded: Vec<(Vec<u32>, Rational)> = monomials
            .into_iter()
            .map(|(c, mut e)| {
                e.resize(width, 0);
                (e, c)
            })
            .collect();
        padded.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, Vec<u32>)> = Vec::new();
        for (e, c) in padded {
            match merged.last_mut() {
                Some((acc, last)) if last == &e => *acc = &*acc + &c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Poly { monomials: merged }
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::new(alloc::vec![(c, Vec::new())])
    }

    /// The variable `x_i` among `dim` variables.
    pub fn variable(i: usize, dim: usize) -> Poly {
        let mut exps = alloc::vec![0u32; dim];
        exps[i] = 1;
        Poly::new(alloc::vec![(Rational::one(), exps)])
    }

    /// Univariate polynomial from dense coefficients (constant first).
    pub fn univariate(coeffs: &[Rational]) -> Poly {
        Poly::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (c.clone(), alloc::vec![k as u32]))
                .collect(),
        )
    }

    pub fn monomials(&self) -> &[(Rational, Vec<u32>)] {
        &self.monomials
    }

    pub fn eval_rational(&self, xs: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (c, exps) in &self.monomials {
            let mut term = c.clone();
            for (x, &e) in xs.iter().zip(exps.iter()) {
                term = term * x.pow_i64(e as i64);
            }
            acc = acc + term;
        }
        acc
    }
}

/// Pointwise star-extension of a polynomial map: the sequence class is
/// closed under ring operations, so the result stays symbolic.
pub fn star_apply_poly(p: &Poly, xs: &[Hyper]) -> Hyper {
    let mut acc = SeqExpr::zero();
    for (c, exps) in p.monomials() {
        let mut term = SeqExpr::constant(c.clone());
        for (x, &e) in xs.iter().zip(exps.iter()) {
            for _ in 0..e {
                term = term.mul(x.seq());
            }
        }
        acc = acc.add(&term);
    }
    Hyper::from_seq(acc)
}

/// Star-extension membership `[u] in *D`: the index set `{n | u_n in D}`
/// is computed symbolically, then the oracle decides.
pub fn star_member(oracle: &mut FilterOracle, x: &Hyper, d: &RealSet) -> bool {
    oracle.dominant(&d.membership_set(x.seq()))
}

/// Index set of membership in one open rational interval.
fn open_interval_set(x: &SeqExpr, iv: &Interval) -> EpSet {
    let lower = match iv.lo() {
        Endpoint::NegInf => EpSet::full(),
        Endpoint::PosInf => EpSet::empty(),
        Endpoint::Finite(a) => x.sub(&SeqExpr::constant(a.clone())).sign_set(|s| s > 0),
    };
    let upper = match iv.hi() {
        Endpoint::PosInf => EpSet::full(),
        Endpoint::NegInf => EpSet::empty(),
        Endpoint::Finite(b) => x.sub(&SeqExpr::constant(b.clone())).sign_set(|s| s < 0),
    };
    lower.intersect(&upper)
}

/// Index set of pair-membership in a rectangle union.
pub fn pair_membership_set(c: &OpenRelation, x: &Hyper, y: &Hyper) -> EpSet {
    let mut out = EpSet::empty();
    for rect in c.rects() {
        out = out.union(
            &open_interval_set(x.seq(), &rect.x).intersect(&open_interval_set(y.seq(), &rect.y)),
        );
    }
    out
}

/// `([u],[v]) in *C` for a rectangle-union relation.
pub fn star_pair_member(oracle: &mut FilterOracle, c: &OpenRelation, x: &Hyper, y: &Hyper) -> bool {
    oracle.dominant(&pair_membership_set(c, x, y))
}

/// Membership of `[u]` in the star-extension of the domain of `C`.
pub fn star_in_dom(oracle: &mut FilterOracle, c: &OpenRelation, x: &Hyper) -> bool {
    let mut set = EpSet::empty();
    for iv in c.dom().intervals() {
        set = set.union(&open_interval_set(x.seq(), iv));
    }
    oracle.dominant(&set)
}

/// Witness construction for the existential projection: if `[u]` lies in
/// `*[dom C]`, build `[v]` with `([u],[v]) in *C` by giving each branch of
/// `u` the midpoint of the first rectangle slice that eventually contains
/// it. Returns `Ok(None)` when `[u]` is not in the extended domain
/// (nothing to witness). A failure of the construction is a continuity
/// counterexample for the relation instance.
pub fn star_exists_witness(
    oracle: &mut FilterOracle,
    c: &OpenRelation,
    x: &Hyper,
) -> Result<Option<Hyper>> {
    if !star_in_dom(oracle, c, x) {
        return Ok(None);
    }
    let mut values: Vec<(EpSet, Option<Rational>)> = Vec::new();
    for (set, _) in x.seq().branches() {
        if set.is_finite() {
            values.push((set.clone(), None));
            continue;
        }
        // First rectangle whose x-slice eventually contains this branch.
        let stable = c.rects().iter().find(|rect| {
            let inside = open_interval_set(x.seq(), &rect.x);
            set.minus(&inside).is_finite()
        });
        match stable {
            Some(rect) => values.push((set.clone(), Some(slice_midpoint(&rect.y)))),
            None => {
                // The branch visits the domain without settling into one
                // slice; if the branch even matters (it is infinite), no
                // eventually-constant witness exists on it.
                let in_dom: EpSet = c
                    .dom()
                    .intervals()
                    .iter()
                    .fold(EpSet::empty(), |acc, iv| {
                        acc.union(&open_interval_set(x.seq(), iv))
                    });
                if set.intersect(&in_dom).is_infinite() {
                    return Err(Error::ContinuityCounterexample {
                        detail: "no eventually-stable rectangle slice on a branch".to_string(),
                    });
                }
                values.push((set.clone(), None));
            }
        }
    }
    let limits: Vec<&Rational> = values.iter().filter_map(|(_, v)| v.as_ref()).collect();
    let Some(first) = limits.first() else {
        return Err(Error::ContinuityCounterexample {
            detail: "no branch admits a witness value".to_string(),
        });
    };
    if limits.iter().any(|v| v != first) {
        // Piecewise constants with different values on infinite branches
        // would not be a Cauchy sequence: the instance is discontinuous.
        return Err(Error::ContinuityCounterexample {
            detail: "branch witnesses disagree, no Cauchy witness exists".to_string(),
        });
    }
    let fill = (*first).clone();
    let witness = SeqExpr::piecewise(
        values
            .into_iter()
            .map(|(set, v)| (set, PowerSum::constant(v.unwrap_or_else(|| fill.clone()))))
            .collect(),
    )?;
    let v = Hyper::from_seq(witness);
    if !star_pair_member(oracle, c, x, &v) {
        return Err(Error::ContinuityCounterexample {
            detail: "constructed witness fails pair membership".to_string(),
        });
    }
    Ok(Some(v))
}

fn slice_midpoint(iv: &Interval) -> Rational {
    match (iv.lo(), iv.hi()) {
        (Endpoint::Finite(a), Endpoint::Finite(b)) => (a + b) / Rational::from_int(2),
        (Endpoint::NegInf, Endpoint::Finite(b)) => b - &Rational::one(),
        (Endpoint::Finite(a), Endpoint::PosInf) => a + &Rational::one(),
        _ => Rational::zero(),
    }
}

/// Domain of a rectangle relation (exact interval union).
pub fn relation_dom(c: &OpenRelation) -> OpenSet {
    c.dom()
}

/// Codomain of a rectangle relation.
pub fn relation_cod(c: &OpenRelation) -> OpenSet {
    c.cod()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrapower::oracle::Strategy;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    fn alternating() -> Hyper {
        Hyper::from_seq(
            SeqExpr::two_case(
                EpSet::evens(),
                PowerSum::reciprocal_power(Rational::one(), Rational::one()),
                PowerSum::reciprocal_power(-Rational::one(), Rational::one()),
            )
            .unwrap(),
        )
    }

    #[test]
    fn reciprocal_is_not_zero_but_infinitesimal() {
        for strategy in Strategy::all() {
            let mut o = FilterOracle::new(strategy);
            let u = Hyper::reciprocal();
            // equal-set is empty: never dominant, though Cauchy-equivalent
            assert!(!hyper_eq(&mut o, &u, &Hyper::zero()));
            assert!(is_infinitesimal_hyper(&mut o, &u, 20));
            assert_eq!(st_hyper(&u), Rational::zero());
        }
    }

    #[test]
    fn alternating_sign_depends_on_strategy() {
        let x = alternating();
        let mut evens = FilterOracle::new(Strategy::EvensFirst);
        assert!(hyper_le(&mut evens, &Hyper::zero(), &x));
        let mut odds = FilterOracle::new(Strategy::OddsFirst);
        assert!(!hyper_le(&mut odds, &Hyper::zero(), &x));
        // infinitesimal under every strategy: the limit is zero
        for strategy in Strategy::all() {
            let mut o = FilterOracle::new(strategy);
            assert!(is_infinitesimal_hyper(&mut o, &alternating(), 10));
        }
    }

    #[test]
    fn ring_ops_are_pointwise() {
        let u = Hyper::reciprocal();
        let sq = u.mul(&u);
        for n in 0..10 {
            assert_eq!(
                sq.seq().value_exact(n).unwrap(),
                Rational::new(1, ((n + 1) * (n + 1)) as i64)
            );
        }
        assert_eq!(u.add(&Hyper::zero()), u);
    }

    #[test]
    fn zero_divisor_pattern() {
        // u vanishes on evens, w on odds; the product vanishes identically
        // and exactly one factor is oracle-zero under every strategy.
        let u = Hyper::from_seq(
            SeqExpr::two_case(
                EpSet::evens(),
                PowerSum::zero(),
                PowerSum::reciprocal_power(Rational::one(), Rational::one()),
            )
            .unwrap(),
        );
        let w = Hyper::from_seq(
            SeqExpr::two_case(
                EpSet::evens(),
                PowerSum::reciprocal_power(Rational::one(), Rational::one()),
                PowerSum::zero(),
            )
            .unwrap(),
        );
        let prod = u.mul(&w);
        assert!(prod.seq().is_identically_zero());
        for strategy in Strategy::all() {
            let mut o = FilterOracle::new(strategy);
            assert!(hyper_eq(&mut o, &prod, &Hyper::zero()));
            let u_zero = hyper_eq(&mut o, &u, &Hyper::zero());
            let w_zero = hyper_eq(&mut o, &w, &Hyper::zero());
            assert!(u_zero ^ w_zero, "exactly one factor must vanish");
        }
    }

    #[test]
    fn polynomial_extension() {
        let p = Poly::univariate(&[Rational::zero(), Rational::zero(), Rational::one()]);
        let u = Hyper::reciprocal();
        let squared = star_apply_poly(&p, std::slice::from_ref(&u));
        assert_eq!(squared, u.mul(&u));
        let identity = Poly::univariate(&[Rational::zero(), Rational::one()]);
        assert_eq!(star_apply_poly(&identity, std::slice::from_ref(&u)), u);
    }

    #[test]
    fn star_membership() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let u = Hyper::reciprocal();
        assert!(star_member(&mut o, &u, &RealSet::open(Rational::zero(), Rational::one())));
        assert!(!star_member(&mut o, &u, &RealSet::singleton(Rational::zero())));
        let two = Hyper::constant(Rational::from_int(2));
        assert!(star_member(&mut o, &two, &RealSet::open(Rational::zero(), Rational::from_int(3))));
    }

    #[test]
    fn witness_construction() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let a: OpenSet = "(0,1)".parse().unwrap();
        let b: OpenSet = "(0,1)".parse().unwrap();
        let c = OpenRelation::new(
            alloc::vec![crate::sets::Rect {
                x: Interval::open(Rational::zero(), Rational::one()).unwrap(),
                y: Interval::open(Rational::zero(), Rational::one()).unwrap(),
            }],
            &a,
            &b,
        )
        .unwrap();
        // u_n = 1/2 + 1/(n+1): witness is the midpoint 1/2.
        let u = Hyper::from_seq(SeqExpr::from_power_sum(PowerSum::new(
            half(),
            alloc::vec![(Rational::one(), Rational::one())],
        )));
        let witness = star_exists_witness(&mut o, &c, &u).unwrap().unwrap();
        assert_eq!(witness, Hyper::constant(half()));
        // a constant far outside the domain has nothing to witness
        let outside = Hyper::constant(Rational::from_int(7));
        assert!(star_exists_witness(&mut o, &c, &outside).unwrap().is_none());
    }
}
