//! Fermat extension of smooth functions via the truncated Taylor formula.
//!
//! For arguments `x_j = r_j + h_j` with standard parts `r_j` and nilpotent
//! `h_j`, the extension is the finite sum `sum_{|j| <= n} h^j/j! ∂^j f(r)`
//! with `n = max_j floor(w(h_j))`: every omitted term vanishes by
//! nilpotency, so the truncation degree is exact, not an approximation.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::fermat::FermatReal;
use crate::rational::{Mode, Rational, Scalar};

use super::expr::Expr;

/// Evaluated jet of a smooth function at a real base point: all mixed
/// partials `∂^j f(x)` for multi-indices `|j| <= degree`. Symmetry of mixed
/// partials holds by construction from symbolic differentiation.
#[derive(Debug, Clone)]
pub struct TaylorData {
    base: Vec<Scalar>,
    degree: u64,
    partials: BTreeMap<Vec<u64>, Scalar>,
}

impl TaylorData {
    /// Differentiates symbolically and evaluates every partial at `base`.
    pub fn build(f: &Arc<Expr>, base: &[Scalar], degree: u64) -> Result<TaylorData> {
        let dim = base.len().max(1);
        let mut exprs: BTreeMap<Vec<u64>, Arc<Expr>> = BTreeMap::new();
        exprs.insert(vec![0; dim], f.clone());
        let mut partials = BTreeMap::new();
        for index in multi_indices(dim, degree) {
            let expr = match exprs.get(&index) {
                Some(e) => e.clone(),
                None => {
                    let k = index
                        .iter()
                        .position(|&c| c > 0)
                        .expect("nonzero index has a nonzero slot");
                    let mut parent = index.clone();
                    parent[k] -= 1;
                    let parent_expr = exprs.get(&parent).expect("graded order").clone();
                    let e = parent_expr.differentiate(k);
                    exprs.insert(index.clone(), e.clone());
                    e
                }
            };
            let value = expr.eval_real(base).map_err(map_not_smooth)?;
            partials.insert(index, value);
        }
        Ok(TaylorData { base: base.to_vec(), degree, partials })
    }

    pub fn base(&self) -> &[Scalar] {
        &self.base
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// The partial `∂^j f(base)`, if `|j| <= degree`.
    pub fn partial(&self, index: &[u64]) -> Option<&Scalar> {
        self.partials.get(index)
    }

    /// True when every stored partial is exact.
    pub fn is_exact(&self) -> bool {
        self.partials.values().all(|s| s.mode() == Mode::Exact)
    }

    fn lowered(&self) -> TaylorData {
        TaylorData {
            base: self.base.iter().map(Scalar::to_approx).collect(),
            degree: self.degree,
            partials: self
                .partials
                .iter()
                .map(|(k, v)| (k.clone(), v.to_approx()))
                .collect(),
        }
    }
}

/// `log` and `sqrt` have no smooth extension at argument zero; everything
/// else propagates as an evaluation error.
fn map_not_smooth(e: Error) -> Error {
    match e {
        Error::Eval { primitive: p @ ("log" | "sqrt"), at_zero: true } => {
            Error::NotSmoothHere { primitive: p }
        }
        other => other,
    }
}

/// All multi-indices of the given dimension with total degree `<= max`,
/// in graded order.
fn multi_indices(dim: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for total in 0..=max {
        let mut current = vec![0u64; dim];
        fill(dim, total, 0, &mut current, &mut out);
    }
    out
}

fn fill(dim: usize, left: u64, slot: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if slot == dim - 1 {
        current[slot] = left;
        out.push(current.clone());
        return;
    }
    for take in 0..=left {
        current[slot] = take;
        fill(dim, left - take, slot + 1, current, out);
    }
    current[slot] = 0;
}

fn factorial(index: &[u64]) -> Rational {
    let mut acc = BigInt::one();
    for &j in index {
        for m in 2..=j {
            acc *= BigInt::from(m);
        }
    }
    Rational::from_big(acc, BigInt::one())
}

/// Applies a smooth function (as an expression in `d` variables) to Fermat
/// reals. For standard-real arguments this is a true extension: it equals
/// plain evaluation. Exact arguments with partials inside the exact-value
/// table stay exact; otherwise the whole result is lowered to approximate
/// mode so no value mixes scalar modes.
pub fn ext_apply(f: &Arc<Expr>, args: &[FermatReal]) -> Result<FermatReal> {
    if f.dimension() > args.len() {
        return Err(Error::Precondition {
            op: "ext_apply",
            reason: alloc::format!(
                "expression uses {} variables, got {} arguments",
                f.dimension(),
                args.len()
            ),
        });
    }
    let mode = args.first().map(|a| a.mode()).unwrap_or(Mode::Exact);
    if args.iter().any(|a| a.mode() != mode) {
        return Err(Error::ModeMismatch { op: "ext_apply" });
    }
    let base: Vec<Scalar> = args.iter().map(|a| a.st().clone()).collect();
    let mut increments: Vec<FermatReal> = Vec::with_capacity(args.len());
    for a in args {
        increments.push(a.checked_sub(&FermatReal::from_scalar(a.st().clone()))?);
    }
    // Least degree with every h_j^(n+1) = 0.
    let degree = increments
        .iter()
        .filter_map(|h| h.order().ok().and_then(Rational::floor_u64))
        .max()
        .unwrap_or(0);
    ext_apply_at_degree(f, &base, &increments, degree, mode)
}

/// Worker shared with the truncation-stability tests: same sum, explicit
/// degree.
pub fn ext_apply_at_degree(
    f: &Arc<Expr>,
    base: &[Scalar],
    increments: &[FermatReal],
    degree: u64,
    mode: Mode,
) -> Result<FermatReal> {
    let mut jet = TaylorData::build(f, base, degree)?;
    let mut incs: Vec<FermatReal> = increments.to_vec();
    if mode == Mode::Exact && !jet.is_exact() {
        jet = jet.lowered();
        incs = incs.iter().map(FermatReal::to_approx).collect();
    }
    let result_mode = if jet.is_exact() { Mode::Exact } else { Mode::Approx };
    let mut acc = FermatReal::zero_in_mode(result_mode);
    for (index, value) in &jet.partials {
        let mut monomial = FermatReal::one_in_mode(result_mode);
        for (h, &power) in incs.iter().zip(index.iter()) {
            if power > 0 {
                monomial = monomial.checked_mul(&h.pow_int(power as u32))?;
            }
        }
        if monomial.is_zero() {
            continue;
        }
        let weight = factorial(index).recip();
        let coef = match result_mode {
            Mode::Exact => value.checked_mul(&Scalar::Exact(weight), "ext_apply")?,
            Mode::Approx => Scalar::Approx(value.to_f64() * weight.to_f64()),
        };
        acc = acc.checked_add(&monomial.scale(&coef)?)?;
    }
    Ok(acc)
}

/// Derivative at a standard point, read off the coefficient of `dt` in
/// `ext f(x + dt) - f(x)`; by the first-order Taylor formula no other term
/// can contribute.
pub fn derivative_at(f: &Arc<Expr>, x: &Scalar) -> Result<Scalar> {
    let arg = FermatReal::from_scalar(x.clone())
        .checked_add(&FermatReal::dt_in_mode(Rational::one(), x.mode())?)?;
    let extended = ext_apply(f, core::slice::from_ref(&arg))?;
    let fx = FermatReal::from_scalar(extended.st().clone());
    let diff = extended.checked_sub(&fx)?;
    debug_assert!(
        diff.terms().iter().all(|t| t.order() == &Rational::one()),
        "only the dt term may survive at first order"
    );
    for t in diff.terms() {
        if t.order() == &Rational::one() {
            return Ok(t.coef().clone());
        }
    }
    Ok(Scalar::zero(diff.mode()))
}

/// Absolute value on Fermat reals, decided by the total order (not by a
/// Taylor formula: `abs` is not smooth at zero).
pub fn ext_abs(x: &FermatReal) -> FermatReal {
    let zero = FermatReal::zero_in_mode(x.mode());
    match x.compare(&zero) {
        Ok(Ordering::Less) => x.negate(),
        _ => x.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(a: i64) -> FermatReal {
        FermatReal::dt(Rational::from_int(a)).unwrap()
    }

    fn exact(n: i64) -> Scalar {
        Scalar::Exact(Rational::from_int(n))
    }

    #[test]
    fn sine_of_infinitesimal_polynomial() {
        // ext(sin)(dt_3 + 2 dt_2) = dt_3 + 2 dt_2 - (1/6) dt
        let f = Expr::sin(Expr::var(0));
        let x = dt(3) + 2 * dt(2);
        let got = ext_apply(&f, &[x]).unwrap();
        let expected = dt(3) + 2 * dt(2) + Rational::new(-1, 6) * dt(1);
        assert_eq!(got, expected);
    }

    #[test]
    fn cosine_of_infinitesimal_polynomial() {
        // ext(cos)(-dt_4 - 4 dt) = 1 - (1/2) dt_2 + (1/24) dt
        let f = Expr::cos(Expr::var(0));
        let y = -1 * dt(4) + -4 * dt(1);
        let got = ext_apply(&f, &[y]).unwrap();
        let expected = FermatReal::from_int(1)
            + Rational::new(-1, 2) * dt(2)
            + Rational::new(1, 24) * dt(1);
        assert_eq!(got, expected);
    }

    #[test]
    fn einstein_nilsquare() {
        // f(x, t) = t^2 applied at (x0, tau) with tau = dt gives tau^2 = 0.
        let f = Expr::pow_int(Expr::var(1), 2);
        let x0 = FermatReal::from_int(5);
        let tau = dt(1);
        let got = ext_apply(&f, &[x0, tau]).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn true_extension_on_reals() {
        let f = Expr::add(Expr::pow_int(Expr::var(0), 2), Expr::int(1));
        let got = ext_apply(&f, &[FermatReal::from_int(3)]).unwrap();
        assert_eq!(got, FermatReal::from_int(10));
    }

    #[test]
    fn derivative_reads_dt_coefficient() {
        let sq = Expr::pow_int(Expr::var(0), 2);
        assert_eq!(derivative_at(&sq, &exact(3)).unwrap(), exact(6));
        let sin = Expr::sin(Expr::var(0));
        assert_eq!(derivative_at(&sin, &exact(0)).unwrap(), exact(1));
        let exp = Expr::exp(Expr::var(0));
        assert_eq!(derivative_at(&exp, &exact(0)).unwrap(), exact(1));
    }

    #[test]
    fn abs_by_order() {
        assert_eq!(ext_abs(&(-1 * dt(1))), dt(1));
        let x = FermatReal::from_int(3) + dt(1);
        assert_eq!(ext_abs(&x), x);
        assert!(ext_abs(&FermatReal::zero()).is_zero());
    }

    #[test]
    fn mixed_exact_and_transcendental_branches_lower_to_approx() {
        // x^2 + sin(x) at 1/3: the polynomial branch is exact, the sine is
        // not; the value (and the whole extension) falls back to doubles.
        let f = Expr::add(
            Expr::pow_int(Expr::var(0), 2),
            Expr::sin(Expr::var(0)),
        );
        let third = Rational::new(1, 3);
        let direct = f.eval_real(&[Scalar::Exact(third.clone())]).unwrap();
        let expected = (1.0f64 / 3.0).powi(2) + (1.0f64 / 3.0).sin();
        assert!((direct.to_f64() - expected).abs() < 1e-15);
        assert!(matches!(direct, Scalar::Approx(_)));

        let arg = FermatReal::from_rational(third) + dt(1);
        let extended = ext_apply(&f, &[arg]).unwrap();
        assert_eq!(extended.mode(), Mode::Approx);
        let slope = extended.terms()[0].coef().to_f64();
        assert!((slope - (2.0 / 3.0 + (1.0f64 / 3.0).cos())).abs() < 1e-12);
    }

    #[test]
    fn mixed_partials_commute() {
        // f(x, y) = x^2 y + sin(x y): d2f/dxdy and d2f/dydx agree at points.
        let f = Expr::add(
            Expr::mul(Expr::pow_int(Expr::var(0), 2), Expr::var(1)),
            Expr::sin(Expr::mul(Expr::var(0), Expr::var(1))),
        );
        let dxy = f.differentiate(0).differentiate(1);
        let dyx = f.differentiate(1).differentiate(0);
        for (x, y) in [(0.3, 0.7), (-1.2, 0.5), (2.0, -0.25)] {
            let point = [Scalar::Approx(x), Scalar::Approx(y)];
            let a = dxy.eval_real(&point).unwrap().to_f64();
            let b = dyx.eval_real(&point).unwrap().to_f64();
            assert!((a - b).abs() < 1e-12);
        }
        // And the jet table realizes them as one entry.
        let jet = TaylorData::build(&f, &[exact(1), exact(2)], 2).unwrap();
        assert!(jet.partial(&[1, 1]).is_some());
    }

    #[test]
    fn log_of_infinitesimal_rejected() {
        let f = Expr::log(Expr::var(0));
        let err = ext_apply(&f, &[dt(1)]).unwrap_err();
        assert_eq!(err, Error::NotSmoothHere { primitive: "log" });
        let g = Expr::sqrt(Expr::var(0));
        let err = ext_apply(&g, &[dt(2)]).unwrap_err();
        assert_eq!(err, Error::NotSmoothHere { primitive: "sqrt" });
    }

    #[test]
    fn lorentz_identity() {
        // ext((1 - v^2)^(-1/2)) at v = beta dt_2 equals 1 + beta^2 dt / 2.
        let v = Expr::var(0);
        let f = Expr::div(
            Expr::int(1),
            Expr::sqrt(Expr::sub(Expr::int(1), Expr::pow_int(v, 2))),
        );
        for beta in [1i64, 2, 3, -5] {
            let arg = Rational::from_int(beta) * dt(2);
            let got = ext_apply(&f, &[arg]).unwrap();
            let expected = FermatReal::from_int(1)
                + Rational::new(beta * beta, 2) * dt(1);
            assert_eq!(got, expected);
        }
    }
}
