//! Exact arbitrary-precision rationals and the two-mode scalar carrier.
//!
//! [`Rational`] wraps `num_rational::BigRational`: always in lowest terms,
//! denominator positive, arithmetic exact. [`Scalar`] is the coefficient
//! carrier used throughout the crate: either an exact rational or a
//! double-precision approximation. A value never mixes the two modes;
//! every binary operation checks compatibility.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, reducing to lowest terms.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Builds from big integers, reducing to lowest terms.
    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero; callers check first.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Largest integer `<= self`.
    pub fn floor_big(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// `floor` clamped into `u64`; `None` for negative or oversized values.
    pub fn floor_u64(&self) -> Option<u64> {
        self.floor_big().to_u64()
    }

    /// Integer power with sign-aware exponent.
    pub fn pow_i64(&self, exp: i64) -> Self {
        if exp == 0 {
            return Rational::one();
        }
        let mag = exp.unsigned_abs() as u32;
        let powed = Rational(Pow::pow(&self.0, mag));
        if exp < 0 {
            powed.recip()
        } else {
            powed
        }
    }

    /// Exact `n`-th root when it exists (`self >= 0`, `n >= 1`).
    pub fn nth_root_exact(&self, n: u32) -> Option<Rational> {
        if self.is_negative() || n == 0 {
            return None;
        }
        if n == 1 || self.is_zero() {
            return Some(self.clone());
        }
        let num_root = self.numer().nth_root(n);
        let den_root = self.denom().nth_root(n);
        if &Pow::pow(&num_root, n) == self.numer() && &Pow::pow(&den_root, n) == self.denom() {
            Some(Rational::from_big(num_root, den_root))
        } else {
            None
        }
    }

    /// Exact rational power `self^(p/q)` when the q-th root exists.
    ///
    /// Requires `self >= 0`; negative exponents invert (zero base rejected).
    pub fn pow_rational_exact(&self, exp: &Rational) -> Option<Rational> {
        if exp.is_zero() {
            return Some(Rational::one());
        }
        if self.is_zero() {
            return if exp.is_positive() { Some(Rational::zero()) } else { None };
        }
        let q = exp.denom().to_u32()?;
        let p = exp.numer().to_i64()?;
        let root = self.nth_root_exact(q)?;
        Some(root.pow_i64(p))
    }

    /// Compares `self^exp` with `rhs` for `self > 0`, `rhs >= 0`, `exp > 0`,
    /// entirely in exact arithmetic: `a^(p/q) <=> b` iff `a^p <=> b^q`.
    pub fn pow_cmp(&self, exp: &Rational, rhs: &Rational) -> Ordering {
        debug_assert!(self.is_positive() && exp.is_positive() && !rhs.is_negative());
        let p = exp
            .numer()
            .to_u32()
            .expect("exponent numerator fits u32");
        let q = exp
            .denom()
            .to_u32()
            .expect("exponent denominator fits u32");
        let lhs_pow = Pow::pow(&self.0, p);
        let rhs_pow = Pow::pow(&rhs.0, q);
        lhs_pow.cmp(&rhs_pow)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest double; may round for large numerators/denominators.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Best rational approximation of a double with denominator at most
    /// `max_denom`, by continued fractions. Returns `None` for non-finite
    /// input.
    pub fn approximate_f64(value: f64, max_denom: u64) -> Option<Rational> {
        if !value.is_finite() {
            return None;
        }
        let negative = value < 0.0;
        let mut x = if negative { -value } else { value };
        // Continued-fraction convergents p/q with q bounded.
        let (mut p0, mut q0, mut p1, mut q1) = (
            BigInt::zero(),
            BigInt::one(),
            BigInt::one(),
            BigInt::zero(),
        );
        let bound = BigInt::from(max_denom);
        for _ in 0..64 {
            let a = x.floor();
            if !a.is_finite() || a.abs() >= 9.0e18 {
                break;
            }
            let a_big = BigInt::from(a as i64);
            let p2 = &a_big * &p1 + &p0;
            let q2 = &a_big * &q1 + &q0;
            if q2 > bound {
                break;
            }
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = x - a;
            if frac < 1.0e-15 {
                break;
            }
            x = frac.recip();
        }
        if q1.is_zero() {
            return None;
        }
        let r = Rational::from_big(p1, q1);
        Some(if negative { -r } else { r })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl core::str::FromStr for Rational {
    type Err = Error;

    /// Accepts `p` or `p/q` with optional sign.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            column: 1,
            message: String::from(msg),
        };
        match s.split_once('/') {
            None => {
                let n: BigInt = s.trim().parse().map_err(|_| bad("expected an integer"))?;
                Ok(Rational(BigRational::from_integer(n)))
            }
            Some((num, den)) => {
                let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
                let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Ok(Rational::from_big(n, d))
            }
        }
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

/// Least common multiple of the denominators of a list of rationals.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> BigInt {
    let mut acc = BigInt::one();
    for r in items {
        acc = acc.lcm(r.denom());
    }
    acc
}

/// Scalar arithmetic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact rational arithmetic; never prunes, never rounds.
    Exact,
    /// Double-precision arithmetic; tiny coefficients are pruned during
    /// normalization.
    Approx,
}

/// Relative threshold for pruning approximate coefficients to zero.
pub const APPROX_EPSILON: f64 = 1.0e-12;

/// Coefficient carrier: exact rational or double approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::zero()),
            Mode::Approx => Scalar::Approx(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::one()),
            Mode::Approx => Scalar::Approx(1.0),
        }
    }

    pub fn from_int(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::from_int(n)),
            Mode::Approx => Scalar::Approx(n as f64),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approx,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => *v == 0.0,
        }
    }

    /// -1, 0 or +1 (approximate scalars by float sign).
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => r.signum(),
            Scalar::Approx(v) => {
                if *v > 0.0 {
                    1
                } else if *v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// The exact rational inside, if this is an exact scalar.
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Approx(v) => *v,
        }
    }

    /// Lowers to approximate mode (identity on approximate scalars).
    pub fn to_approx(&self) -> Scalar {
        Scalar::Approx(self.to_f64())
    }

    fn check_modes(&self, other: &Scalar, op: &'static str) -> Result<()> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(Error::ModeMismatch { op })
        }
    }

    pub fn checked_add(&self, other: &Scalar, op: &'static str) -> Result<Scalar> {
        self.check_modes(other, op)?;
        Ok(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a + b),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar, op: &'static str) -> Result<Scalar> {
        self.checked_add(&other.neg(), op)
    }

    pub fn checked_mul(&self, other: &Scalar, op: &'static str) -> Result<Scalar> {
        self.check_modes(other, op)?;
        Ok(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a * b),
            _ => unreachable!(),
        })
    }

    /// Division; rejects a zero divisor.
    pub fn checked_div(&self, other: &Scalar, op: &'static str) -> Result<Scalar> {
        self.check_modes(other, op)?;
        if other.is_zero() {
            return Err(Error::Eval { primitive: "/", at_zero: true });
        }
        Ok(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a / b),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(v) => Scalar::Approx(Float::abs(*v)),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Approx(v) => Scalar::Approx(v.recip()),
        })
    }

    /// Magnitude as a double, used for relative pruning thresholds.
    pub fn magnitude(&self) -> f64 {
        Float::abs(self.to_f64())
    }

    /// Comparison: exact scalars compare exactly; approximate scalars treat
    /// values within a relative epsilon as equal (non-total near ties).
    pub fn compare(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let a = self.to_f64();
                let b = other.to_f64();
                let scale = 1.0 + Float::max(Float::abs(a), Float::abs(b));
                let d = a - b;
                if Float::abs(d) <= APPROX_EPSILON * scale {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

/// Parses a whitespace-free decimal, integer or `p/q` literal into a
/// rational. Decimal points are expanded exactly (`1.25` -> `5/4`).
pub fn parse_rational_literal(s: &str) -> Result<Rational> {
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                column: 1,
                message: "bad decimal literal".to_string(),
            });
        }
        let joined: String = [int_part, frac_part].concat();
        let numer: BigInt = joined.parse().map_err(|_| Error::Parse {
            column: 1,
            message: "bad decimal literal".to_string(),
        })?;
        let denom = Pow::pow(&BigInt::from(10), frac_part.len() as u32);
        Ok(Rational::from_big(numer, denom))
    } else {
        s.parse()
    }
}

/// Splits a rational exponent into `(numerator, denominator)` as small
/// unsigned integers, for root-taking. Errors when the parts overflow.
pub fn exponent_parts(exp: &Rational) -> Result<(u64, u32)> {
    let p = exp.numer().to_u64().ok_or_else(|| Error::Precondition {
        op: "exponent_parts",
        reason: "exponent numerator too large".to_string(),
    })?;
    let q = exp.denom().to_u32().ok_or_else(|| Error::Precondition {
        op: "exponent_parts",
        reason: "exponent denominator too large".to_string(),
    })?;
    Ok((p, q))
}

/// All denominators of a list of rationals as `u32`s (for lcm of roots).
pub fn small_denominators<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Option<Vec<u32>> {
    items.into_iter().map(|r| r.denom().to_u32()).collect()
}
