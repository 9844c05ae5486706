//! Smooth-function expressions and their Fermat extension: symbolic
//! differentiation, exact-where-possible evaluation, and the truncated
//! Taylor formula as a fractional-order forward-mode differentiation engine.

mod expr;
mod taylor;
mod text;

pub use expr::{eval_unary, is_polynomial, poly_coefficients, Expr};
pub use taylor::{derivative_at, ext_abs, ext_apply, ext_apply_at_degree, TaylorData};
pub use text::{parse_expr, parse_with_vars, to_text, to_text_named};
