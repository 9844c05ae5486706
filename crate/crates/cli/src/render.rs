//! Value rendering: the decomposition format for Fermat reals, symbolic
//! sequences, and rats-style rational approximation for approximate scalars.

use continuum::rational::{Rational, Scalar};
use continuum::ultrapower::{Hyper, PowerSum};
use continuum::FermatReal;

/// Largest denominator used when approximating a double as a fraction.
const RATS_MAX_DENOM: u64 = 1_000_000;

/// Renders a scalar: exact rationals verbatim, approximate values as their
/// best rational approximation with bounded denominator.
pub fn scalar_string(s: &Scalar) -> String {
    match s {
        Scalar::Exact(r) => r.to_string(),
        Scalar::Approx(v) => match Rational::approximate_f64(*v, RATS_MAX_DENOM) {
            Some(r) => r.to_string(),
            None => format!("{v}"),
        },
    }
}

fn dt_symbol(order: &Rational) -> String {
    if order == &Rational::one() {
        "dt".to_string()
    } else {
        format!("dt_{order}")
    }
}

/// Decomposition display: standard part first, then the infinitesimal terms
/// in decreasing order, coefficients as reduced fractions, unit coefficients
/// dropped, e.g. `2 + 3*dt_2 - 1/3*dt` or `-dt_4 - 4*dt`.
pub fn fermat_string(x: &FermatReal) -> String {
    if x.is_real() {
        return scalar_string(x.st());
    }
    let mut out = String::new();
    let mut first = true;
    if !x.st().is_zero() {
        out.push_str(&scalar_string(x.st()));
        first = false;
    }
    for term in x.terms() {
        let negative = term.coef().signum() < 0;
        let magnitude = scalar_string(&term.coef().abs());
        if first {
            if negative {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if magnitude != "1" {
            out.push_str(&magnitude);
            out.push('*');
        }
        out.push_str(&dt_symbol(term.order()));
    }
    out
}

fn power_sum_string(p: &PowerSum) -> String {
    let mut out = String::new();
    let mut first = true;
    if !p.limit().is_zero() || p.terms().is_empty() {
        out.push_str(&p.limit().to_string());
        first = false;
    }
    for (alpha, q) in p.terms() {
        let negative = alpha.is_negative();
        let mag = alpha.abs();
        if first {
            if negative {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if mag != Rational::one() {
            out.push_str(&mag.to_string());
            out.push('*');
        }
        if q == &Rational::one() {
            out.push_str("1/(n+1)");
        } else if q.is_integer() {
            out.push_str(&format!("1/(n+1)^{q}"));
        } else {
            out.push_str(&format!("1/(n+1)^({q})"));
        }
    }
    out
}

/// Symbolic-sequence display: the power sum when there is a single branch,
/// otherwise the branch list with its index sets.
pub fn hyper_string(h: &Hyper) -> String {
    let branches = h.seq().branches();
    if branches.len() == 1 {
        return format!("[{}]", power_sum_string(&branches[0].1));
    }
    let mut out = String::from("[");
    for (i, (set, p)) in branches.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&format!("{set}: {}", power_sum_string(p)));
    }
    out.push(']');
    out
}
