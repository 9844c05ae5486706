//! Expression trees for smooth functions, with symbolic differentiation and
//! (exact where possible) real evaluation.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::rational::{Mode, Rational, Scalar};

/// Syntax tree of a smooth function of `d` real variables.
///
/// Subtrees are reference-counted so differentiation can share structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    PowInt(Arc<Expr>, u32),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sqrt(Arc<Expr>),
}

// The smart constructors below are associated functions on shared subtrees,
// not operator methods; the names mirror the node kinds.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(r: Rational) -> Arc<Expr> {
        Arc::new(Expr::Const(r))
    }

    pub fn int(n: i64) -> Arc<Expr> {
        Self::constant(Rational::from_int(n))
    }

    pub fn var(index: usize) -> Arc<Expr> {
        Arc::new(Expr::Var(index))
    }

    fn as_const(e: &Arc<Expr>) -> Option<&Rational> {
        match e.as_ref() {
            Expr::Const(r) => Some(r),
            _ => None,
        }
    }

    /// Smart constructor: folds constants, drops zero summands.
    pub fn add(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (Self::as_const(&a), Self::as_const(&b)) {
            (Some(x), Some(y)) => Self::constant(x + y),
            (Some(x), None) if x.is_zero() => b,
            (None, Some(y)) if y.is_zero() => a,
            _ => Arc::new(Expr::Add(a, b)),
        }
    }

    pub fn sub(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (Self::as_const(&a), Self::as_const(&b)) {
            (Some(x), Some(y)) => Self::constant(x - y),
            (None, Some(y)) if y.is_zero() => a,
            (Some(x), None) if x.is_zero() => Self::neg(b),
            _ => Arc::new(Expr::Sub(a, b)),
        }
    }

    /// Smart constructor: annihilates on zero, drops unit factors.
    pub fn mul(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (Self::as_const(&a), Self::as_const(&b)) {
            (Some(x), Some(y)) => Self::constant(x * y),
            (Some(x), None) => {
                if x.is_zero() {
                    Self::constant(Rational::zero())
                } else if x == &Rational::one() {
                    b
                } else {
                    Arc::new(Expr::Mul(a, b))
                }
            }
            (None, Some(y)) => {
                if y.is_zero() {
                    Self::constant(Rational::zero())
                } else if y == &Rational::one() {
                    a
                } else {
                    Arc::new(Expr::Mul(a, b))
                }
            }
            _ => Arc::new(Expr::Mul(a, b)),
        }
    }

    pub fn div(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        if let (Some(x), Some(y)) = (Self::as_const(&a), Self::as_const(&b)) {
            if !y.is_zero() {
                return Self::constant(x / y);
            }
        }
        if let Some(x) = Self::as_const(&a) {
            if x.is_zero() {
                return Self::constant(Rational::zero());
            }
        }
        if let Some(y) = Self::as_const(&b) {
            if y == &Rational::one() {
                return a;
            }
        }
        Arc::new(Expr::Div(a, b))
    }

    pub fn neg(a: Arc<Expr>) -> Arc<Expr> {
        match a.as_ref() {
            Expr::Const(r) => Self::constant(-r),
            Expr::Neg(inner) => inner.clone(),
            _ => Arc::new(Expr::Neg(a)),
        }
    }

    pub fn pow_int(a: Arc<Expr>, k: u32) -> Arc<Expr> {
        match k {
            0 => Self::constant(Rational::one()),
            1 => a,
            _ => match Self::as_const(&a) {
                Some(x) => Self::constant(x.pow_i64(k as i64)),
                None => Arc::new(Expr::PowInt(a, k)),
            },
        }
    }

    pub fn sin(a: Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Sin(a))
    }

    pub fn cos(a: Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Cos(a))
    }

    pub fn exp(a: Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Exp(a))
    }

    pub fn log(a: Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Log(a))
    }

    pub fn sqrt(a: Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Sqrt(a))
    }

    /// Smallest dimension containing every variable (0 for closed terms).
    pub fn dimension(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.dimension().max(b.dimension())
            }
            Expr::Neg(a)
            | Expr::PowInt(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Exp(a)
            | Expr::Log(a)
            | Expr::Sqrt(a) => a.dimension(),
        }
    }

    /// Symbolic partial derivative with respect to variable `var`.
    /// Total on the tree; simplification happens in the smart constructors.
    pub fn differentiate(self: &Arc<Expr>, var: usize) -> Arc<Expr> {
        match self.as_ref() {
            Expr::Const(_) => Expr::constant(Rational::zero()),
            Expr::Var(i) => {
                if *i == var {
                    Expr::constant(Rational::one())
                } else {
                    Expr::constant(Rational::zero())
                }
            }
            Expr::Add(a, b) => Expr::add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(var), b.clone()),
                Expr::mul(a.clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.differentiate(var), b.clone()),
                    Expr::mul(a.clone(), b.differentiate(var)),
                ),
                Expr::pow_int(b.clone(), 2),
            ),
            Expr::Neg(a) => Expr::neg(a.differentiate(var)),
            Expr::PowInt(a, k) => Expr::mul(
                Expr::mul(
                    Expr::constant(Rational::from_int(*k as i64)),
                    Expr::pow_int(a.clone(), k - 1),
                ),
                a.differentiate(var),
            ),
            Expr::Sin(a) => Expr::mul(Expr::cos(a.clone()), a.differentiate(var)),
            Expr::Cos(a) => Expr::neg(Expr::mul(Expr::sin(a.clone()), a.differentiate(var))),
            Expr::Exp(a) => Expr::mul(Expr::exp(a.clone()), a.differentiate(var)),
            Expr::Log(a) => Expr::div(a.differentiate(var), a.clone()),
            Expr::Sqrt(a) => Expr::div(
                a.differentiate(var),
                Expr::mul(Expr::int(2), Expr::sqrt(a.clone())),
            ),
        }
    }

    /// Evaluates at a real point. Stays exact along paths inside the
    /// exact-value table (ring operations at rationals; `sin`, `cos`, `exp`
    /// at 0; `log` at 1; `sqrt` at perfect squares); any other transcendental
    /// evaluation falls back to an approximate scalar.
    pub fn eval_real(&self, point: &[Scalar]) -> Result<Scalar> {
        match self {
            Expr::Const(r) => Ok(match point.first().map(Scalar::mode) {
                Some(Mode::Approx) => Scalar::Approx(r.to_f64()),
                _ => Scalar::Exact(r.clone()),
            }),
            Expr::Var(i) => point.get(*i).cloned().ok_or_else(|| Error::Precondition {
                op: "eval_real",
                reason: alloc::format!("variable x{} outside the point dimension", i + 1),
            }),
            Expr::Add(a, b) => Ok(Self::eval_combine(
                a.eval_real(point)?,
                b.eval_real(point)?,
                |x, y| x + y,
                |x, y| x + y,
            )),
            Expr::Sub(a, b) => Ok(Self::eval_combine(
                a.eval_real(point)?,
                b.eval_real(point)?,
                |x, y| x - y,
                |x, y| x - y,
            )),
            Expr::Mul(a, b) => Ok(Self::eval_combine(
                a.eval_real(point)?,
                b.eval_real(point)?,
                |x, y| x * y,
                |x, y| x * y,
            )),
            Expr::Div(a, b) => {
                let num = a.eval_real(point)?;
                let den = b.eval_real(point)?;
                if den.is_zero() {
                    return Err(Error::Eval { primitive: "/", at_zero: true });
                }
                Ok(Self::eval_combine(num, den, |x, y| x / y, |x, y| x / y))
            }
            Expr::Neg(a) => Ok(a.eval_real(point)?.neg()),
            Expr::PowInt(a, k) => {
                let base = a.eval_real(point)?;
                Ok(match base {
                    Scalar::Exact(r) => Scalar::Exact(r.pow_i64(*k as i64)),
                    Scalar::Approx(v) => Scalar::Approx(Float::powi(v, *k as i32)),
                })
            }
            Expr::Sin(a) => Self::eval_transcendental(a, point, "sin"),
            Expr::Cos(a) => Self::eval_transcendental(a, point, "cos"),
            Expr::Exp(a) => Self::eval_transcendental(a, point, "exp"),
            Expr::Log(a) => Self::eval_transcendental(a, point, "log"),
            Expr::Sqrt(a) => Self::eval_transcendental(a, point, "sqrt"),
        }
    }

    /// Combines two evaluated operands: exact when both are exact,
    /// otherwise the value falls back to doubles (a branch left the
    /// exact-value table).
    fn eval_combine(
        a: Scalar,
        b: Scalar,
        exact: impl Fn(Rational, Rational) -> Rational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Scalar {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
            (a, b) => Scalar::Approx(approx(a.to_f64(), b.to_f64())),
        }
    }

    fn eval_transcendental(
        arg: &Arc<Expr>,
        point: &[Scalar],
        which: &'static str,
    ) -> Result<Scalar> {
        let v = arg.eval_real(point)?;
        match &v {
            Scalar::Exact(r) => {
                // Exact-value table.
                match which {
                    "sin" if r.is_zero() => return Ok(Scalar::Exact(Rational::zero())),
                    "cos" if r.is_zero() => return Ok(Scalar::Exact(Rational::one())),
                    "exp" if r.is_zero() => return Ok(Scalar::Exact(Rational::one())),
                    "log" if r == &Rational::one() => return Ok(Scalar::Exact(Rational::zero())),
                    "log" if !r.is_positive() => {
                        return Err(Error::Eval { primitive: "log", at_zero: r.is_zero() })
                    }
                    "sqrt" if !r.is_positive() => {
                        return Err(Error::Eval { primitive: "sqrt", at_zero: r.is_zero() })
                    }
                    "sqrt" => {
                        if let Some(root) = r.nth_root_exact(2) {
                            return Ok(Scalar::Exact(root));
                        }
                    }
                    _ => {}
                }
                Ok(Scalar::Approx(Self::float_primitive(which, r.to_f64())))
            }
            Scalar::Approx(v) => {
                match which {
                    "log" if *v <= 0.0 => {
                        return Err(Error::Eval { primitive: "log", at_zero: *v == 0.0 })
                    }
                    "sqrt" if *v <= 0.0 => {
                        return Err(Error::Eval { primitive: "sqrt", at_zero: *v == 0.0 })
                    }
                    _ => {}
                }
                Ok(Scalar::Approx(Self::float_primitive(which, *v)))
            }
        }
    }

    fn float_primitive(which: &'static str, v: f64) -> f64 {
        match which {
            "sin" => Float::sin(v),
            "cos" => Float::cos(v),
            "exp" => Float::exp(v),
            "log" => Float::ln(v),
            "sqrt" => Float::sqrt(v),
            _ => unreachable!(),
        }
    }

    /// Rebuilds the tree through the smart constructors (idempotent).
    pub fn canon(self: &Arc<Expr>) -> Arc<Expr> {
        match self.as_ref() {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::add(a.canon(), b.canon()),
            Expr::Sub(a, b) => Expr::sub(a.canon(), b.canon()),
            Expr::Mul(a, b) => Expr::mul(a.canon(), b.canon()),
            Expr::Div(a, b) => Expr::div(a.canon(), b.canon()),
            Expr::Neg(a) => Expr::neg(a.canon()),
            Expr::PowInt(a, k) => Expr::pow_int(a.canon(), *k),
            Expr::Sin(a) => Expr::sin(a.canon()),
            Expr::Cos(a) => Expr::cos(a.canon()),
            Expr::Exp(a) => Expr::exp(a.canon()),
            Expr::Log(a) => Expr::log(a.canon()),
            Expr::Sqrt(a) => Expr::sqrt(a.canon()),
        }
    }
}

/// Convenience: evaluates a one-variable expression.
pub fn eval_unary(f: &Arc<Expr>, x: &Scalar) -> Result<Scalar> {
    f.eval_real(core::slice::from_ref(x))
}

/// A polynomial check used by transfer tests: true when the tree uses only
/// ring operations (no division or transcendentals).
pub fn is_polynomial(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Var(_) => true,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            is_polynomial(a) && is_polynomial(b)
        }
        Expr::Neg(a) | Expr::PowInt(a, _) => is_polynomial(a),
        _ => false,
    }
}

/// Flattens a polynomial expression into dense coefficients (one variable).
/// Returns `None` when the expression is not a univariate polynomial.
pub fn poly_coefficients(e: &Expr) -> Option<Vec<Rational>> {
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = alloc::vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        out
    }
    fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = a.to_vec();
        if out.len() < b.len() {
            out.resize(b.len(), Rational::zero());
        }
        for (i, y) in b.iter().enumerate() {
            out[i] = &out[i] + y;
        }
        out
    }
    let coeffs = match e {
        Expr::Const(r) => alloc::vec![r.clone()],
        Expr::Var(0) => alloc::vec![Rational::zero(), Rational::one()],
        Expr::Var(_) => return None,
        Expr::Add(a, b) => add(&poly_coefficients(a)?, &poly_coefficients(b)?),
        Expr::Sub(a, b) => {
            let neg: Vec<Rational> = poly_coefficients(b)?.iter().map(|c| -c).collect();
            add(&poly_coefficients(a)?, &neg)
        }
        Expr::Mul(a, b) => mul(&poly_coefficients(a)?, &poly_coefficients(b)?),
        Expr::Neg(a) => poly_coefficients(a)?.iter().map(|c| -c).collect(),
        Expr::PowInt(a, k) => {
            let base = poly_coefficients(a)?;
            let mut acc = alloc::vec![Rational::one()];
            for _ in 0..*k {
                acc = mul(&acc, &base);
            }
            acc
        }
        _ => return None,
    };
    let mut coeffs = coeffs;
    while coeffs.len() > 1 && coeffs.last().is_some_and(Rational::is_zero) {
        coeffs.pop();
    }
    Some(coeffs)
}
