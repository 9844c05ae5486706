//! The ring of Fermat reals: exact nilpotent-infinitesimal arithmetic.
//!
//! A Fermat real is a standard part plus a canonical list of infinitesimal
//! terms `c·dt_w`, stored by strictly decreasing order `w >= 1`. The basic
//! infinitesimal `dt_a` squares away according to `dt_a · dt_b =
//! dt_{ab/(a+b)}`, every term of order `< 1` is zero, and the decomposition
//! is unique, which makes equality, order, nilpotency and products of
//! powers decidable in exact rational arithmetic.

mod repr;

pub use repr::SampleBase;

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::{Mode, Rational, Scalar, APPROX_EPSILON};

/// One infinitesimal summand `coef · dt_order` of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    coef: Scalar,
    order: Rational,
}

impl Term {
    /// Coefficient; never zero in a canonical value.
    pub fn coef(&self) -> &Scalar {
        &self.coef
    }

    /// Order `w >= 1` of the infinitesimal `dt_w`.
    pub fn order(&self) -> &Rational {
        &self.order
    }

    /// Representative exponent `1/w` in `(0, 1]`.
    pub fn exponent(&self) -> Rational {
        self.order.recip()
    }
}

/// Element of the ring of Fermat reals in canonical decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FermatReal {
    std_part: Scalar,
    terms: Vec<Term>,
}

/// Verdict of the product-of-powers decision procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerProduct {
    /// The product vanishes.
    Zero,
    /// The product is a nonzero infinitesimal of the given order.
    NonZero {
        order: Rational,
    },
}

impl FermatReal {
    pub fn zero() -> Self {
        Self::zero_in_mode(Mode::Exact)
    }

    pub fn zero_in_mode(mode: Mode) -> Self {
        FermatReal { std_part: Scalar::zero(mode), terms: Vec::new() }
    }

    pub fn one_in_mode(mode: Mode) -> Self {
        FermatReal { std_part: Scalar::one(mode), terms: Vec::new() }
    }

    /// Embeds a standard real (no infinitesimal part).
    pub fn from_scalar(s: Scalar) -> Self {
        FermatReal { std_part: s, terms: Vec::new() }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_scalar(Scalar::Exact(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    /// The basic infinitesimal `dt_a` of order `a > 0`: the pure term
    /// `1·dt_a` when `a >= 1`, and zero when `a < 1`.
    pub fn dt(order: Rational) -> Result<Self> {
        Self::dt_in_mode(order, Mode::Exact)
    }

    /// `dt_a` with coefficients in the given scalar mode.
    pub fn dt_in_mode(order: Rational, mode: Mode) -> Result<Self> {
        if !order.is_positive() {
            return Err(Error::Domain {
                op: "dt",
                reason: "order must be positive".to_string(),
            });
        }
        if order < Rational::one() {
            return Ok(Self::zero_in_mode(mode));
        }
        Ok(FermatReal {
            std_part: Scalar::zero(mode),
            terms: vec![Term { coef: Scalar::one(mode), order }],
        })
    }

    /// Builds from a standard part and raw `(coefficient, order)` pairs,
    /// normalizing to canonical form. Orders must be positive; orders below
    /// one are dropped (they are zero in the ring).
    pub fn from_parts(std_part: Scalar, terms: Vec<(Scalar, Rational)>) -> Result<Self> {
        let mode = std_part.mode();
        let mut raw = Vec::with_capacity(terms.len());
        for (coef, order) in terms {
            if coef.mode() != mode {
                return Err(Error::ModeMismatch { op: "from_parts" });
            }
            if !order.is_positive() {
                return Err(Error::Domain {
                    op: "from_parts",
                    reason: "term order must be positive".to_string(),
                });
            }
            raw.push(Term { coef, order });
        }
        let scale = raw.iter().map(|t| t.coef.magnitude()).fold(std_part.magnitude(), f64::max);
        Ok(Self::canonical(std_part, raw, scale))
    }

    /// Normalizes: drops orders `< 1`, merges equal orders, prunes zero
    /// coefficients (approximate coefficients relative to `scale`), sorts by
    /// strictly decreasing order.
    fn canonical(std_part: Scalar, mut terms: Vec<Term>, scale: f64) -> Self {
        let one = Rational::one();
        terms.retain(|t| t.order >= one);
        terms.sort_by(|a, b| b.order.cmp(&a.order));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.order == t.order => {
                    last.coef = last
                        .coef
                        .checked_add(&t.coef, "canonical")
                        .expect("canonical terms share the value's mode");
                }
                _ => merged.push(t),
            }
        }
        let threshold = APPROX_EPSILON * (1.0 + scale);
        merged.retain(|t| match &t.coef {
            Scalar::Exact(r) => !r.is_zero(),
            Scalar::Approx(v) => num_traits::Float::abs(*v) > threshold,
        });
        FermatReal { std_part, terms: merged }
    }

    /// Scalar mode of the value.
    pub fn mode(&self) -> Mode {
        self.std_part.mode()
    }

    /// Standard part `st x`.
    pub fn st(&self) -> &Scalar {
        &self.std_part
    }

    /// The infinitesimal terms in decreasing order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The coefficients of the decomposition, leading term first.
    pub fn std_parts(&self) -> Vec<&Scalar> {
        self.terms.iter().map(|t| &t.coef).collect()
    }

    /// The orders of the decomposition, decreasing.
    pub fn orders(&self) -> Vec<&Rational> {
        self.terms.iter().map(|t| &t.order).collect()
    }

    /// Number of infinitesimal terms.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Order of the leading infinitesimal; undefined for standard reals.
    pub fn order(&self) -> Result<&Rational> {
        self.terms.first().map(|t| &t.order).ok_or(Error::UndefinedOrder)
    }

    pub fn is_zero(&self) -> bool {
        self.std_part.is_zero() && self.terms.is_empty()
    }

    /// `st x = 0`.
    pub fn is_infinitesimal(&self) -> bool {
        self.std_part.is_zero()
    }

    /// No infinitesimal part at all.
    pub fn is_real(&self) -> bool {
        self.terms.is_empty()
    }

    /// Units are exactly the elements with nonzero standard part.
    pub fn is_invertible(&self) -> bool {
        !self.std_part.is_zero()
    }

    /// Membership in the ideal `D_a` (`a = None` for `D_infinity`):
    /// infinitesimal and, for finite `a`, of order `< a + 1`.
    pub fn in_ideal(&self, a: Option<&Rational>) -> bool {
        if !self.std_part.is_zero() {
            return false;
        }
        if self.terms.is_empty() {
            return true;
        }
        match a {
            None => true,
            Some(a) => self.terms[0].order < a + &Rational::one(),
        }
    }

    fn approx_scale(&self, other: &FermatReal) -> f64 {
        let own = self
            .terms
            .iter()
            .map(|t| t.coef.magnitude())
            .fold(self.std_part.magnitude(), f64::max);
        other
            .terms
            .iter()
            .map(|t| t.coef.magnitude())
            .fold(f64::max(own, other.std_part.magnitude()), f64::max)
    }

    pub fn checked_add(&self, other: &FermatReal) -> Result<FermatReal> {
        let std_part = self.std_part.checked_add(&other.std_part, "add")?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self::canonical(std_part, terms, self.approx_scale(other)))
    }

    pub fn negate(&self) -> FermatReal {
        FermatReal {
            std_part: self.std_part.neg(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { coef: t.coef.neg(), order: t.order.clone() })
                .collect(),
        }
    }

    pub fn checked_sub(&self, other: &FermatReal) -> Result<FermatReal> {
        self.checked_add(&other.negate())
    }

    /// Order of a product of pure infinitesimals: `ab/(a+b)`.
    /// Equivalently the representative exponents `1/a` and `1/b` add.
    fn product_order(a: &Rational, b: &Rational) -> Rational {
        let num = a * b;
        let den = a + b;
        num / den
    }

    pub fn checked_mul(&self, other: &FermatReal) -> Result<FermatReal> {
        let std_part = self.std_part.checked_mul(&other.std_part, "mul")?;
        let mut terms: Vec<Term> = Vec::new();
        for t in &other.terms {
            terms.push(Term {
                coef: self.std_part.checked_mul(&t.coef, "mul")?,
                order: t.order.clone(),
            });
        }
        for t in &self.terms {
            terms.push(Term {
                coef: t.coef.checked_mul(&other.std_part, "mul")?,
                order: t.order.clone(),
            });
        }
        let one = Rational::one();
        for a in &self.terms {
            for b in &other.terms {
                let order = Self::product_order(&a.order, &b.order);
                if order >= one {
                    terms.push(Term {
                        coef: a.coef.checked_mul(&b.coef, "mul")?,
                        order,
                    });
                }
            }
        }
        Ok(Self::canonical(std_part, terms, self.approx_scale(other)))
    }

    /// Multiplies by a standard scalar.
    pub fn scale(&self, s: &Scalar) -> Result<FermatReal> {
        self.checked_mul(&FermatReal::from_scalar(s.clone()))
    }

    /// `x^k` by repeated multiplication; `x^0 = 1`.
    pub fn pow_int(&self, k: u32) -> FermatReal {
        let mut acc = FermatReal::one_in_mode(self.mode());
        for _ in 0..k {
            acc = acc.checked_mul(self).expect("same mode");
        }
        acc
    }

    /// The rule `(dt_a)^p = dt_{a/p}` for fractional `p >= 1`
    /// (zero when `a/p < 1`).
    pub fn term_pow(order: Rational, p: Rational) -> Result<FermatReal> {
        if !order.is_positive() {
            return Err(Error::Domain {
                op: "term_pow",
                reason: "order must be positive".to_string(),
            });
        }
        if p < Rational::one() {
            return Err(Error::Domain {
                op: "term_pow",
                reason: "exponent must be >= 1".to_string(),
            });
        }
        FermatReal::dt(order / p)
    }

    /// Decides `x^k = 0` for `k > 1` from the decomposition alone, without
    /// forming the power: infinitesimal and of order `< k`.
    pub fn nilpotent_power_is_zero(&self, k: u32) -> Result<bool> {
        if k <= 1 {
            return Err(Error::Precondition {
                op: "nilpotent_power_is_zero",
                reason: "power must exceed 1".to_string(),
            });
        }
        if !self.std_part.is_zero() {
            return Ok(false);
        }
        Ok(match self.terms.first() {
            None => true,
            Some(t) => t.order < Rational::from_int(k as i64),
        })
    }

    /// Decides whether `h_1^{i_1} ... h_m^{i_m}` vanishes, from the orders
    /// alone: zero iff the exponent sum `sum i_k / w(h_k)` exceeds one,
    /// otherwise that sum is the reciprocal order of the product.
    pub fn power_product_decision(
        factors: &[(&FermatReal, u32)],
    ) -> Result<PowerProduct> {
        let mut sum = Rational::zero();
        let mut total_degree: u64 = 0;
        for (h, i) in factors {
            if !h.is_infinitesimal() || h.is_zero() {
                return Err(Error::Domain {
                    op: "power_product_decision",
                    reason: "factors must be nonzero infinitesimals".to_string(),
                });
            }
            let order = h.order().expect("nonzero infinitesimal has an order");
            sum = sum + Rational::from_int(*i as i64) / order.clone();
            total_degree += *i as u64;
        }
        if total_degree == 0 {
            return Err(Error::Domain {
                op: "power_product_decision",
                reason: "at least one exponent must be positive".to_string(),
            });
        }
        if sum > Rational::one() {
            Ok(PowerProduct::Zero)
        } else {
            Ok(PowerProduct::NonZero { order: sum.recip() })
        }
    }

    /// Total-order comparison. Compares standard parts first; on a tie the
    /// sign of the difference is the sign of the coefficient of its
    /// highest-order term. Exact in exact mode; approximate mode compares
    /// scalars with a relative epsilon and is non-total near ties.
    pub fn compare(&self, other: &FermatReal) -> Result<Ordering> {
        let d = self.checked_sub(other)?;
        if !d.std_part.is_zero() {
            return Ok(d.std_part.compare(&Scalar::zero(d.mode())));
        }
        Ok(match d.terms.first() {
            None => Ordering::Equal,
            Some(t) => match t.coef.signum() {
                s if s > 0 => Ordering::Greater,
                s if s < 0 => Ordering::Less,
                _ => Ordering::Equal,
            },
        })
    }

    /// Multiplicative inverse of an invertible element, by the terminating
    /// geometric series `1/(r+h) = (1/r) sum_m (-h/r)^m` with
    /// `m <= floor(w(h))`.
    pub fn invert(&self) -> Result<FermatReal> {
        if self.std_part.is_zero() {
            return Err(Error::NotInvertible);
        }
        let r_inv = self.std_part.recip()?;
        let r_inv_real = FermatReal::from_scalar(r_inv);
        let h = FermatReal {
            std_part: Scalar::zero(self.mode()),
            terms: self.terms.clone(),
        };
        let n = match h.terms.first() {
            None => 0,
            Some(t) => t.order.floor_u64().unwrap_or(0),
        };
        let ratio = h.negate().checked_mul(&r_inv_real)?;
        let mut acc = FermatReal::one_in_mode(self.mode());
        let mut power = FermatReal::one_in_mode(self.mode());
        for _ in 0..n {
            power = power.checked_mul(&ratio)?;
            acc = acc.checked_add(&power)?;
        }
        acc.checked_mul(&r_inv_real)
    }

    /// Ratio `x / y` for invertible `y`.
    pub fn checked_div(&self, other: &FermatReal) -> Result<FermatReal> {
        self.checked_mul(&other.invert()?)
    }

    /// Pseudo-metric `d(x, y) = |st x - st y|`; collapses infinitesimals.
    pub fn pseudo_distance(&self, other: &FermatReal) -> Result<Scalar> {
        Ok(self.std_part.checked_sub(&other.std_part, "pseudo_distance")?.abs())
    }

    /// Lowers every coefficient to approximate mode.
    pub fn to_approx(&self) -> FermatReal {
        FermatReal {
            std_part: self.std_part.to_approx(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { coef: t.coef.to_approx(), order: t.order.clone() })
                .collect(),
        }
    }
}

impl From<i64> for FermatReal {
    fn from(n: i64) -> Self {
        FermatReal::from_int(n)
    }
}

impl From<Rational> for FermatReal {
    fn from(r: Rational) -> Self {
        FermatReal::from_rational(r)
    }
}

macro_rules! fermat_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for FermatReal {
            type Output = FermatReal;
            fn $method(self, rhs: FermatReal) -> FermatReal {
                self.$checked(&rhs).expect("compatible scalar modes")
            }
        }
        impl $trait for &FermatReal {
            type Output = FermatReal;
            fn $method(self, rhs: &FermatReal) -> FermatReal {
                self.$checked(rhs).expect("compatible scalar modes")
            }
        }
    };
}

fermat_binop!(Add, add, checked_add);
fermat_binop!(Sub, sub, checked_sub);
fermat_binop!(Mul, mul, checked_mul);

impl Neg for FermatReal {
    type Output = FermatReal;
    fn neg(self) -> FermatReal {
        self.negate()
    }
}

impl Neg for &FermatReal {
    type Output = FermatReal;
    fn neg(self) -> FermatReal {
        self.negate()
    }
}

impl Mul<FermatReal> for Rational {
    type Output = FermatReal;
    fn mul(self, rhs: FermatReal) -> FermatReal {
        rhs.scale(&Scalar::Exact(self)).expect("exact scalar")
    }
}

impl Mul<FermatReal> for i64 {
    type Output = FermatReal;
    fn mul(self, rhs: FermatReal) -> FermatReal {
        let s = Scalar::from_int(self, rhs.mode());
        rhs.scale(&s).expect("same mode")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(a: i64) -> FermatReal {
        FermatReal::dt(Rational::from_int(a)).unwrap()
    }

    fn dt_q(n: i64, d: i64) -> FermatReal {
        FermatReal::dt(Rational::new(n, d)).unwrap()
    }

    #[test]
    fn dt_basics() {
        assert_eq!(dt(2).n_terms(), 1);
        assert_eq!(dt(2).order().unwrap(), &Rational::from_int(2));
        // dt_a = 0 for a < 1
        assert!(dt_q(1, 2).is_zero());
        assert_eq!(dt(1), dt(1));
        assert!(FermatReal::dt(Rational::zero()).is_err());
        assert!(FermatReal::dt(Rational::from_int(-1)).is_err());
    }

    #[test]
    fn addition_cancels_and_sorts() {
        let x = FermatReal::from_int(2) + 3 * dt(2);
        let back = &x + &(-3 * dt(2));
        assert_eq!(back, FermatReal::from_int(2));

        let y = dt(3) + 2 * dt(2);
        assert_eq!(y.orders(), vec![&Rational::from_int(3), &Rational::from_int(2)]);
        assert_eq!(&y + &FermatReal::zero(), y);
    }

    #[test]
    fn product_rule() {
        // dt_3 · dt_2 = dt_{6/5}
        assert_eq!(&dt(3) * &dt(2), dt_q(6, 5));
        // dt · dt = 0
        assert!((&dt(1) * &dt(1)).is_zero());
        // (dt_3 + 2 dt_2)^3 = dt
        let x = dt(3) + 2 * dt(2);
        assert_eq!(x.pow_int(3), dt(1));
    }

    #[test]
    fn pow_rules() {
        assert_eq!(dt(2).pow_int(2), dt(1));
        assert!(dt(2).pow_int(3).is_zero());
        assert_eq!(dt(2).pow_int(0), FermatReal::from_int(1));
        assert_eq!(
            FermatReal::term_pow(Rational::from_int(3), Rational::new(3, 2)).unwrap(),
            dt(2)
        );
        assert_eq!(
            FermatReal::term_pow(Rational::from_int(2), Rational::from_int(2)).unwrap(),
            dt(1)
        );
        assert_eq!(
            FermatReal::term_pow(Rational::one(), Rational::one()).unwrap(),
            dt(1)
        );
        assert!(FermatReal::term_pow(Rational::from_int(3), Rational::new(1, 2)).is_err());
    }

    #[test]
    fn decomposition_accessors() {
        // x = 2 + 3 dt_2 - (1/3) dt
        let x = FermatReal::from_int(2) + 3 * dt(2) + Rational::new(-1, 3) * dt(1);
        assert_eq!(x.st(), &Scalar::Exact(Rational::from_int(2)));
        assert_eq!(x.n_terms(), 2);
        assert_eq!(x.order().unwrap(), &Rational::from_int(2));
        assert_eq!(x.orders(), vec![&Rational::from_int(2), &Rational::from_int(1)]);
        assert_eq!(dt(3).st(), &Scalar::Exact(Rational::zero()));
        assert!(FermatReal::from_int(5).order().is_err());
    }

    #[test]
    fn predicates() {
        let one = Rational::one();
        assert!(dt(1).in_ideal(Some(&one)));
        assert!(!dt(2).in_ideal(Some(&one)));
        assert!(dt(2).in_ideal(None));
        assert!((FermatReal::from_int(1) + dt(1)).is_invertible());
        assert!(dt(1).is_infinitesimal());
        assert!(!dt(1).is_real());
        assert!(FermatReal::from_int(3).is_real());
    }

    #[test]
    fn nilpotency_decision() {
        assert!(!dt(2).nilpotent_power_is_zero(2).unwrap());
        assert!(dt(2).nilpotent_power_is_zero(3).unwrap());
        let unit = FermatReal::from_int(1) + dt(1);
        assert!(!unit.nilpotent_power_is_zero(5).unwrap());
        assert!(FermatReal::zero().nilpotent_power_is_zero(2).unwrap());
        assert!(dt(2).nilpotent_power_is_zero(1).is_err());
    }

    #[test]
    fn power_product() {
        let h2 = dt(2);
        let h3 = dt(3);
        assert_eq!(
            FermatReal::power_product_decision(&[(&h2, 1), (&h3, 1)]).unwrap(),
            PowerProduct::NonZero { order: Rational::new(6, 5) }
        );
        assert_eq!(
            FermatReal::power_product_decision(&[(&h2, 2), (&h3, 1)]).unwrap(),
            PowerProduct::Zero
        );
        assert_eq!(
            FermatReal::power_product_decision(&[(&dt(1), 1)]).unwrap(),
            PowerProduct::NonZero { order: Rational::one() }
        );
        let unit = FermatReal::from_int(1);
        assert!(FermatReal::power_product_decision(&[(&unit, 1)]).is_err());
    }

    #[test]
    fn order_decision() {
        // 0 < dt < dt_2 < dt_3
        let zero = FermatReal::zero();
        assert_eq!(zero.compare(&dt(1)).unwrap(), Ordering::Less);
        assert_eq!(dt(1).compare(&dt(2)).unwrap(), Ordering::Less);
        assert_eq!(dt(2).compare(&dt(3)).unwrap(), Ordering::Less);
        let x = dt(2) + (-1 * dt(1));
        assert_eq!(x.compare(&x).unwrap(), Ordering::Equal);
        let y = dt(2) + (-2 * dt(1));
        assert_eq!(x.compare(&y).unwrap(), Ordering::Greater);
    }

    #[test]
    fn inversion() {
        let x = FermatReal::from_int(1) + dt(1);
        let expected = FermatReal::from_int(1) + (-1 * dt(1));
        assert_eq!(x.invert().unwrap(), expected);
        assert_eq!((&x * &x.invert().unwrap()), FermatReal::from_int(1));

        assert_eq!(
            FermatReal::from_int(2).invert().unwrap(),
            FermatReal::from_rational(Rational::new(1, 2))
        );

        // the cos divisor: 1/(1 - dt_2/2 + dt/24) = 1 + dt_2/2 + 5/24 dt
        let y = FermatReal::from_int(1)
            + Rational::new(-1, 2) * dt(2)
            + Rational::new(1, 24) * dt(1);
        let expected = FermatReal::from_int(1)
            + Rational::new(1, 2) * dt(2)
            + Rational::new(5, 24) * dt(1);
        assert_eq!(y.invert().unwrap(), expected);
        assert_eq!(&y * &y.invert().unwrap(), FermatReal::from_int(1));

        assert_eq!(dt(1).invert(), Err(Error::NotInvertible));
    }

    #[test]
    fn pseudo_metric() {
        assert!(dt(1).pseudo_distance(&dt(3)).unwrap().is_zero());
        let a = FermatReal::from_int(1) + dt(1);
        let b = FermatReal::from_int(3);
        assert_eq!(
            a.pseudo_distance(&b).unwrap(),
            Scalar::Exact(Rational::from_int(2))
        );
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let exact = FermatReal::from_int(1);
        let approx = FermatReal::from_scalar(Scalar::Approx(1.0));
        assert!(exact.checked_add(&approx).is_err());
        assert!(exact.checked_mul(&approx).is_err());
    }

    #[test]
    fn approx_pruning() {
        let tiny = FermatReal::from_parts(
            Scalar::Approx(1.0),
            vec![(Scalar::Approx(1.0e-16), Rational::from_int(2))],
        )
        .unwrap();
        assert!(tiny.is_real());
    }
}
