//! Representative-level views of a Fermat real: exact sampling of the
//! little-oh polynomial, the planar graph, and order-separation witnesses.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Float, One, Pow, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::{denominator_lcm, Mode, Rational, Scalar};

use super::FermatReal;

/// Choice of the basic null sequence a representative is evaluated against.
///
/// The default is `s_n = 1/(n+1)`. `PowerOfReciprocal(q)` rebases onto
/// `s_n = (1/(n+1))^q`, realizing the change-of-infinitesimal isomorphism at
/// the representative level.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleBase {
    Default,
    PowerOfReciprocal(Rational),
}

impl SampleBase {
    fn exponent(&self) -> Result<Rational> {
        match self {
            SampleBase::Default => Ok(Rational::one()),
            SampleBase::PowerOfReciprocal(q) => {
                if q.is_positive() {
                    Ok(q.clone())
                } else {
                    Err(Error::Domain {
                        op: "representative_sample",
                        reason: "base exponent must be positive".to_string(),
                    })
                }
            }
        }
    }
}

impl FermatReal {
    /// Value of the canonical representative at index `n >= 1`:
    /// `st x + sum_i c_i · s_n^(1/w_i)` with `s_n = 1/(n+1)` (or the given
    /// base). In exact mode `n+1` must be a perfect `L`-th power, `L` the
    /// lcm of the exponent denominators, so every fractional power is
    /// rational; otherwise the call is rejected.
    pub fn representative_sample(&self, n: u64, base: &SampleBase) -> Result<Scalar> {
        self.representative_sample_big(&num_bigint::BigInt::from(n + 1), base)
    }

    /// [`FermatReal::representative_sample`] with an arbitrary-precision
    /// index `n+1` (stabilization thresholds can exceed machine integers).
    pub fn representative_sample_big(
        &self,
        index: &num_bigint::BigInt,
        base: &SampleBase,
    ) -> Result<Scalar> {
        if index < &num_bigint::BigInt::from(2) {
            return Err(Error::Precondition {
                op: "representative_sample",
                reason: "index must be at least 1".to_string(),
            });
        }
        let q = base.exponent()?;
        match self.mode() {
            Mode::Approx => {
                let s = 1.0 / index.to_f64().unwrap_or(f64::INFINITY);
                let mut acc = self.st().to_f64();
                for t in self.terms() {
                    let e = (&q * &t.exponent()).to_f64();
                    acc += t.coef().to_f64() * Float::powf(s, e);
                }
                Ok(Scalar::Approx(acc))
            }
            Mode::Exact => {
                let exponents: Vec<Rational> =
                    self.terms().iter().map(|t| &q * &t.exponent()).collect();
                let lcm = denominator_lcm(exponents.iter());
                let level = lcm.to_u32().ok_or_else(|| Error::Precondition {
                    op: "representative_sample",
                    reason: "exponent denominators too large".to_string(),
                })?;
                let root = index.nth_root(level);
                if &Pow::pow(&root, level) != index {
                    return Err(Error::Precondition {
                        op: "representative_sample",
                        reason: "n+1 is not a perfect L-th power for this value".to_string(),
                    });
                }
                let m = Rational::from_big(root, num_bigint::BigInt::one());
                let mut acc = match self.st() {
                    Scalar::Exact(r) => r.clone(),
                    Scalar::Approx(_) => unreachable!(),
                };
                for (t, e) in self.terms().iter().zip(exponents.iter()) {
                    // (1/(n+1))^e = m^(-e*L), and e*L is an integer.
                    let power = (e * &Rational::from_big(lcm.clone(), num_bigint::BigInt::one()))
                        .numer()
                        .to_i64()
                        .ok_or_else(|| Error::Precondition {
                            op: "representative_sample",
                            reason: "exponent too large".to_string(),
                        })?;
                    let factor = m.pow_i64(-power);
                    let coef = t.coef().as_exact().expect("exact mode");
                    acc = acc + coef * &factor;
                }
                Ok(Scalar::Exact(acc))
            }
        }
    }

    /// Points `(p, t)` of the planar graph: `p = st x + sum_i c_i t^(1/w_i)`
    /// for `t` on a uniform grid over `[0, delta)`. Standard reals yield a
    /// vertical tick at `st x`. Each `p` is exact whenever every fractional
    /// power of that `t` is rational, otherwise approximate.
    pub fn graph_points(
        &self,
        delta: &Rational,
        samples: usize,
    ) -> Result<Vec<(Scalar, Rational)>> {
        if !delta.is_positive() {
            return Err(Error::Domain {
                op: "graph_points",
                reason: "delta must be positive".to_string(),
            });
        }
        if samples < 2 {
            return Err(Error::Domain {
                op: "graph_points",
                reason: "need at least two samples".to_string(),
            });
        }
        let step = delta / &Rational::from_int(samples as i64);
        let mut points = Vec::with_capacity(samples);
        for k in 0..samples {
            let t = &step * &Rational::from_int(k as i64);
            points.push((self.graph_value(&t), t));
        }
        Ok(points)
    }

    /// Graph abscissa at parameter `t >= 0`.
    pub fn graph_value(&self, t: &Rational) -> Scalar {
        match self.mode() {
            Mode::Approx => {
                let tf = t.to_f64();
                let mut acc = self.st().to_f64();
                for term in self.terms() {
                    acc += term.coef().to_f64() * Float::powf(tf, term.exponent().to_f64());
                }
                Scalar::Approx(acc)
            }
            Mode::Exact => {
                let mut exact_acc = self.st().as_exact().expect("exact mode").clone();
                for term in self.terms() {
                    match t.pow_rational_exact(&term.exponent()) {
                        Some(p) => {
                            exact_acc = exact_acc + term.coef().as_exact().expect("exact") * &p;
                        }
                        None => {
                            // Irrational power: fall back to floats for this point.
                            let tf = t.to_f64();
                            let mut acc = self.st().to_f64();
                            for term in self.terms() {
                                acc += term.coef().to_f64()
                                    * Float::powf(tf, term.exponent().to_f64());
                            }
                            return Scalar::Approx(acc);
                        }
                    }
                }
                Scalar::Exact(exact_acc)
            }
        }
    }

    /// A `delta > 0` such that for every `t` in `(0, delta)` the graph of
    /// `self` lies strictly left of the graph of `other`. Requires
    /// `self < other` in exact mode. The witness is found by halving `delta`
    /// until a sufficient leading-term domination bound holds, so the
    /// separation is guaranteed for all of `(0, delta)`, not just sampled
    /// points.
    pub fn separation_delta(&self, other: &FermatReal) -> Result<Rational> {
        if self.mode() != Mode::Exact || other.mode() != Mode::Exact {
            return Err(Error::Precondition {
                op: "separation_delta",
                reason: "exact scalar mode required".to_string(),
            });
        }
        if self.compare(other)? != Ordering::Less {
            return Err(Error::Precondition {
                op: "separation_delta",
                reason: "arguments must satisfy x < y".to_string(),
            });
        }
        let d = other.checked_sub(self)?;
        let s = d.st().as_exact().expect("exact mode").clone();
        let terms = d.terms();
        if terms.is_empty() {
            return Ok(Rational::one());
        }
        // Exponents ascending (orders are stored descending).
        let exps: Vec<Rational> = terms.iter().map(|t| t.exponent()).collect();
        let coefs: Vec<Rational> = terms
            .iter()
            .map(|t| t.coef().as_exact().expect("exact mode").clone())
            .collect();
        let (gap, bound) = if s.is_positive() {
            // |sum c_i t^(a_i)| <= C t^(a_1) < s  once  t^(a_1) < s / C.
            let c_sum = coefs.iter().fold(Rational::zero(), |acc, c| acc + c.abs());
            (exps[0].clone(), s / c_sum)
        } else {
            // s = 0: factor the (positive) leading term; the tail is beaten
            // once  t^(a_2 - a_1) < c_1 / sum_{i>=2} |c_i|.
            if terms.len() == 1 {
                return Ok(Rational::one());
            }
            let lead = coefs[0].abs();
            let tail: Rational = coefs[1..]
                .iter()
                .fold(Rational::zero(), |acc, c| acc + c.abs());
            (&exps[1] - &exps[0], lead / tail)
        };
        let mut delta = Rational::one();
        let half = Rational::new(1, 2);
        for _ in 0..64 {
            // delta^gap <= bound suffices: t < delta gives strict inequality.
            if delta.pow_cmp(&gap, &bound) != Ordering::Greater {
                return Ok(delta);
            }
            delta = delta * half.clone();
        }
        Err(Error::Precondition {
            op: "separation_delta",
            reason: "no separation found above 2^-64".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(a: i64) -> FermatReal {
        FermatReal::dt(Rational::from_int(a)).unwrap()
    }

    #[test]
    fn sample_basic() {
        // x = dt at n+1 = 8 -> 1/8
        let s = dt(1).representative_sample(7, &SampleBase::Default).unwrap();
        assert_eq!(s, Scalar::Exact(Rational::new(1, 8)));
        // x = dt_2 at n+1 = 64 -> (1/64)^(1/2) = 1/8
        let s = dt(2).representative_sample(63, &SampleBase::Default).unwrap();
        assert_eq!(s, Scalar::Exact(Rational::new(1, 8)));
        // inexact index is rejected in exact mode
        assert!(dt(2).representative_sample(6, &SampleBase::Default).is_err());
    }

    #[test]
    fn sample_sign_tracks_order() {
        // dt_2 - dt is positive at exact indices
        let d = dt(2) + (-1 * dt(1));
        for m in [2u64, 3, 5, 7, 11] {
            let idx = m * m - 1;
            let v = d.representative_sample(idx, &SampleBase::Default).unwrap();
            assert!(matches!(v, Scalar::Exact(ref r) if r.is_positive()));
        }
    }

    #[test]
    fn rebase_isomorphism() {
        // Against s_n = (1/(n+1))^2, dt samples as (1/(n+1))^2.
        let base = SampleBase::PowerOfReciprocal(Rational::from_int(2));
        let v = dt(1).representative_sample(2, &base).unwrap();
        assert_eq!(v, Scalar::Exact(Rational::new(1, 9)));
    }

    #[test]
    fn graph_contract() {
        let pts = dt(2).graph_points(&Rational::one(), 3).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], (Scalar::Exact(Rational::zero()), Rational::zero()));
        // t = 2/3 is not a perfect square: approximate point
        assert!(matches!(pts[2].0, Scalar::Approx(_)));

        // The square-root curve passes through (sqrt(1/2), 1/2).
        let half = Rational::new(1, 2);
        let p = dt(2).graph_value(&half);
        assert!((p.to_f64() - 0.5f64.sqrt()).abs() < 1e-12);

        let flat = FermatReal::zero().graph_points(&Rational::one(), 5).unwrap();
        assert!(flat.iter().all(|(p, _)| p.is_zero()));

        let tick = FermatReal::from_int(2).graph_points(&Rational::one(), 4).unwrap();
        assert!(tick
            .iter()
            .all(|(p, _)| p == &Scalar::Exact(Rational::from_int(2))));
    }

    #[test]
    fn separation_examples() {
        let zero = FermatReal::zero();
        assert_eq!(zero.separation_delta(&dt(1)).unwrap(), Rational::one());
        assert_eq!(dt(1).separation_delta(&dt(2)).unwrap(), Rational::one());
        // 2 dt vs dt_2: sqrt(t) > 2t needs t <= 1/4
        let two_dt = 2 * dt(1);
        assert_eq!(two_dt.separation_delta(&dt(2)).unwrap(), Rational::new(1, 4));
        assert!(dt(2).separation_delta(&dt(1)).is_err());
    }
}
