//! Field of fractions of the ultrapower ring: pairs `num/den` with the
//! denominator nonzero modulo the oracle. Carries the infinite elements the
//! ring itself cannot hold, the extension of the standard part to `0/0`
//! forms with finite limits, and the derivative as a standard part of a
//! difference quotient.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::epset::EpSet;
use super::hyper::{hyper_eq, Hyper};
use super::oracle::FilterOracle;
use super::powersum::PowerSum;
use super::seq::SeqExpr;

/// Element of the fraction field, as a pair of ring representatives.
#[derive(Debug, Clone)]
pub struct HyperFrac {
    num: Hyper,
    den: Hyper,
}

impl HyperFrac {
    /// Builds `num / den`; the denominator must be nonzero under the oracle.
    pub fn new(oracle: &mut FilterOracle, num: Hyper, den: Hyper) -> Result<HyperFrac> {
        if hyper_eq(oracle, &den, &Hyper::zero()) {
            return Err(Error::DivisionByZero);
        }
        Ok(HyperFrac { num, den })
    }

    /// Embeds a ring element as `x / 1`.
    pub fn from_hyper(x: Hyper) -> HyperFrac {
        HyperFrac { num: x, den: Hyper::constant(Rational::one()) }
    }

    pub fn num(&self) -> &Hyper {
        &self.num
    }

    pub fn den(&self) -> &Hyper {
        &self.den
    }

    pub fn add(&self, other: &HyperFrac) -> HyperFrac {
        HyperFrac {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn neg(&self) -> HyperFrac {
        HyperFrac { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &HyperFrac) -> HyperFrac {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &HyperFrac) -> HyperFrac {
        HyperFrac {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    /// Division; the divisor must be nonzero under the oracle.
    pub fn div(&self, oracle: &mut FilterOracle, other: &HyperFrac) -> Result<HyperFrac> {
        if hyper_eq(oracle, &other.num, &Hyper::zero()) {
            return Err(Error::DivisionByZero);
        }
        Ok(HyperFrac {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        })
    }

    /// Standard part extended to the fraction field: the limit of
    /// `num_n / den_n` when the leading-term analysis yields one finite
    /// rational on every infinite branch; `None` (undefined) otherwise.
    /// Covers the `0/0` forms with finite limits.
    pub fn st(&self) -> Option<Rational> {
        let mut agreed: Option<Rational> = None;
        for (set, num_branch, den_branch) in self.refined_branches() {
            if set.is_finite() {
                continue;
            }
            let limit = ratio_limit(&num_branch, &den_branch)?;
            match &agreed {
                None => agreed = Some(limit),
                Some(prev) if prev == &limit => {}
                Some(_) => return None,
            }
        }
        agreed
    }

    /// Infinitude decided by exact leading-exponent comparison, not
    /// sampling: `|x| > N` for every `N` exactly when the numerator decays
    /// strictly slower than the denominator on a dominant set of branches.
    pub fn is_infinite(&self, oracle: &mut FilterOracle) -> bool {
        let mut diverging = EpSet::empty();
        for (set, num_branch, den_branch) in self.refined_branches() {
            if branch_diverges(&num_branch, &den_branch) {
                diverging = diverging.union(&set);
            }
        }
        oracle.dominant(&diverging)
    }

    /// Membership of the fraction in the star-extension of `[bound, +inf)`:
    /// the index set `{n | num_n >= bound * den_n}` (sign-aware), decided by
    /// the oracle. This is what makes the free-ultrafilter corollary
    /// executable for infinite elements.
    pub fn star_member_ray(&self, oracle: &mut FilterOracle, bound: &Rational) -> bool {
        let mut set = EpSet::empty();
        for (branch_set, num_branch, den_branch) in self.refined_branches() {
            let shifted = SeqExpr::from_power_sum(
                num_branch.sub(&den_branch.scale(bound)),
            );
            let den_seq = SeqExpr::from_power_sum(den_branch);
            let up = shifted.sign_set(|s| s >= 0).intersect(&den_seq.sign_set(|s| s > 0));
            let down = shifted.sign_set(|s| s <= 0).intersect(&den_seq.sign_set(|s| s < 0));
            set = set.union(&branch_set.intersect(&up.union(&down)));
        }
        oracle.dominant(&set)
    }

    fn refined_branches(&self) -> Vec<(EpSet, PowerSum, PowerSum)> {
        let mut out = Vec::new();
        for (sn, pn) in self.num.seq().branches() {
            for (sd, pd) in self.den.seq().branches() {
                let set = sn.intersect(sd);
                if !set.is_empty() {
                    out.push((set, pn.clone(), pd.clone()));
                }
            }
        }
        out
    }
}

/// Limit of `num_n / den_n` along one branch, if finite.
fn ratio_limit(num: &PowerSum, den: &PowerSum) -> Option<Rational> {
    if den.is_zero() {
        return None;
    }
    if !den.limit().is_zero() {
        return Some(num.limit() / den.limit());
    }
    // den -> 0 through its leading power term.
    if !num.limit().is_zero() {
        return None; // finite/0: diverges
    }
    if num.is_zero() {
        return Some(Rational::zero());
    }
    let (num_lead, num_exp) = &num.terms()[0];
    let (den_lead, den_exp) = &den.terms()[0];
    match num_exp.cmp(den_exp) {
        core::cmp::Ordering::Greater => Some(Rational::zero()),
        core::cmp::Ordering::Equal => Some(num_lead / den_lead),
        core::cmp::Ordering::Less => None, // numerator decays slower: diverges
    }
}

fn branch_diverges(num: &PowerSum, den: &PowerSum) -> bool {
    if den.is_zero() || num.is_zero() {
        return false;
    }
    if !den.limit().is_zero() {
        return false;
    }
    if !num.limit().is_zero() {
        return true;
    }
    num.terms()[0].1 < den.terms()[0].1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrapower::oracle::Strategy;

    #[test]
    fn infinite_reciprocal() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let e = HyperFrac::new(
            &mut o,
            Hyper::constant(Rational::one()),
            Hyper::reciprocal(),
        )
        .unwrap();
        assert!(e.is_infinite(&mut o));
        assert_eq!(e.st(), None);
        for n in [1i64, 10, 1000] {
            assert!(e.star_member_ray(&mut o, &Rational::from_int(n)));
        }
    }

    #[test]
    fn derivative_quotient_of_square() {
        // f(x) = x^2 at x = 1 with h = 1/(n+1):
        // (f(1+h) - f(1))/h = 2 + h, standard part 2.
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let h = Hyper::reciprocal();
        let one = Hyper::constant(Rational::one());
        let fx_h = one.add(&h).mul(&one.add(&h));
        let num = fx_h.sub(&one);
        let quotient = HyperFrac::new(&mut o, num, h).unwrap();
        assert_eq!(quotient.st(), Some(Rational::from_int(2)));
    }

    #[test]
    fn zero_over_zero_with_unit_limit() {
        let mut o = FilterOracle::new(Strategy::PreferOut);
        let h = Hyper::reciprocal();
        let q = HyperFrac::new(&mut o, h.clone(), h).unwrap();
        assert_eq!(q.st(), Some(Rational::one()));
        assert!(!q.is_infinite(&mut o));
    }

    #[test]
    fn division_by_oracle_zero_is_rejected() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        assert_eq!(
            HyperFrac::new(&mut o, Hyper::constant(Rational::one()), Hyper::zero()).err(),
            Some(Error::DivisionByZero)
        );
        let x = HyperFrac::from_hyper(Hyper::constant(Rational::one()));
        let z = HyperFrac::from_hyper(Hyper::zero());
        assert_eq!(x.div(&mut o, &z).err(), Some(Error::DivisionByZero));
    }

    #[test]
    fn field_arithmetic() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let h = Hyper::reciprocal();
        let a = HyperFrac::new(&mut o, Hyper::constant(Rational::one()), h.clone()).unwrap();
        // a + (-a) has standard part 0 over a nonzero denominator
        let s = a.add(&a.neg());
        assert!(hyper_eq(&mut o, &s.num().clone(), &Hyper::zero()));
        // a * (1/a) = 1 up to representative: num = den
        let inv = HyperFrac::new(&mut o, h.clone(), Hyper::constant(Rational::one())).unwrap();
        let prod = a.mul(&inv);
        assert!(hyper_eq(&mut o, &prod.num().clone(), &prod.den().clone()));
    }
}
