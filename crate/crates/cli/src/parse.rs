//! Recursive-descent evaluator for the calculator language.
//!
//! Values are evaluated during parsing; the grammar covers Fermat-real
//! expressions (`dt(a)`, rational literals, `+ - * / ^`, comparisons,
//! accessors and predicates, `ext`), the ultrapower sub-language (`seq`,
//! `dominant`, `hst`, `heq`, `hle`), set membership, and `plot`.

use std::collections::BTreeMap;
use std::sync::Arc;

use continuum::rational::{parse_rational_literal, Mode, Rational, Scalar};
use continuum::sets::{Endpoint, Interval, OpenSet};
use continuum::smooth::{self, Expr};
use continuum::ultrapower::{
    hyper_eq, hyper_le, hyper_lt, st_hyper, EpSet, Hyper, PowerSum, RealSet, SeqExpr,
};
use continuum::FermatReal;

use crate::errors::{CliError, CliResult};
use crate::lex::{lex, Tok, Token};
use crate::session::{Binding, NamedFunc, Outcome, Session};

/// An evaluated value.
#[derive(Clone)]
enum Val {
    Fermat(FermatReal),
    Hyp(Hyper),
    Bool(bool),
    Verdict(bool),
    Func(NamedFunc),
}

impl Val {
    fn kind(&self) -> &'static str {
        match self {
            Val::Fermat(_) => "fermat real",
            Val::Hyp(_) => "sequence",
            Val::Bool(_) => "boolean",
            Val::Verdict(_) => "verdict",
            Val::Func(_) => "function",
        }
    }
}

pub struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    session: &'a mut Session,
    force_exact: u32,
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, session: &'a mut Session) -> CliResult<Parser<'a>> {
        Ok(Parser { toks: lex(src)?, pos: 0, session, force_exact: 0 })
    }

    pub fn finish(&self) -> CliResult<()> {
        if self.pos < self.toks.len() {
            return Err(CliError::parse(self.column(), "unexpected trailing input"));
        }
        Ok(())
    }

    /// Evaluates a full statement into an outcome.
    pub fn run_statement(&mut self) -> CliResult<Outcome> {
        let v = self.expr()?;
        Ok(match v {
            Val::Fermat(x) => Outcome::Bind(Binding::Value(x)),
            Val::Hyp(h) => Outcome::Bind(Binding::Hyp(h)),
            Val::Func(f) => Outcome::Bind(Binding::Func(f)),
            Val::Bool(b) => Outcome::Bool(b),
            Val::Verdict(v) => Outcome::Verdict(v),
        })
    }

    /// Parses and executes `plot(delta, x[, samples])`, writing `path`.
    pub fn run_plot(&mut self, path: &str) -> CliResult<String> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Ident(name)) if name == "plot" => {}
            _ => return Err(CliError::parse(col, "expected plot(...)")),
        }
        self.expect(Tok::LParen, "`(`")?;
        self.force_exact += 1;
        let delta_val = self.expr()?;
        self.force_exact -= 1;
        let delta = self.exact_rational(delta_val, col)?;
        self.expect(Tok::Comma, "`,`")?;
        let value = self.expr()?;
        let x = self.as_fermat(value, col)?;
        let samples = if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            let c = self.column();
            match self.bump() {
                Some(Tok::Nat(d)) => d
                    .parse::<usize>()
                    .map_err(|_| CliError::parse(c, "bad sample count"))?,
                _ => return Err(CliError::parse(c, "expected a sample count")),
            }
        } else {
            100
        };
        self.expect(Tok::RParen, "`)`")?;
        if path.is_empty() {
            return Err(CliError::parse(self.column(), "plot needs a target: plot(...) > file"));
        }
        self.session.emit_plot_file(&x, &delta, samples, path)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or_else(|| self.toks.last().map(|t| t.column + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.kind.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> CliResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CliError::parse(self.column(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> CliResult<Val> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Tok::Eq) => Some(Cmp::Eq),
            Some(Tok::Ne) => Some(Cmp::Ne),
            Some(Tok::Lt) => Some(Cmp::Lt),
            Some(Tok::Le) => Some(Cmp::Le),
            Some(Tok::Gt) => Some(Cmp::Gt),
            Some(Tok::Ge) => Some(Cmp::Ge),
            _ => None,
        };
        let Some(op) = op else { return Ok(lhs) };
        let col = self.column();
        self.pos += 1;
        let rhs = self.sum()?;
        self.compare(lhs, rhs, op, col)
    }

    fn compare(&mut self, lhs: Val, rhs: Val, op: Cmp, col: usize) -> CliResult<Val> {
        use core::cmp::Ordering;
        match (lhs, rhs) {
            (Val::Fermat(a), Val::Fermat(b)) => {
                let ord = a.compare(&b).map_err(CliError::from)?;
                Ok(Val::Bool(match op {
                    Cmp::Eq => ord == Ordering::Equal,
                    Cmp::Ne => ord != Ordering::Equal,
                    Cmp::Lt => ord == Ordering::Less,
                    Cmp::Le => ord != Ordering::Greater,
                    Cmp::Gt => ord == Ordering::Greater,
                    Cmp::Ge => ord != Ordering::Less,
                }))
            }
            (Val::Hyp(a), Val::Hyp(b)) => {
                let o = &mut self.session.oracle;
                Ok(Val::Bool(match op {
                    Cmp::Eq => hyper_eq(o, &a, &b),
                    Cmp::Ne => !hyper_eq(o, &a, &b),
                    Cmp::Lt => hyper_lt(o, &a, &b),
                    Cmp::Le => hyper_le(o, &a, &b),
                    Cmp::Gt => hyper_lt(o, &b, &a),
                    Cmp::Ge => hyper_le(o, &b, &a),
                }))
            }
            (a, b) => Err(CliError::parse(
                col,
                format!("cannot compare {} with {}", a.kind(), b.kind()),
            )),
        }
    }

    fn sum(&mut self) -> CliResult<Val> {
        let mut acc = self.term()?;
        loop {
            let col = self.column();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.binop(acc, rhs, '+', col)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.binop(acc, rhs, '-', col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> CliResult<Val> {
        let mut acc = self.unary()?;
        loop {
            let col = self.column();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.binop(acc, rhs, '*', col)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.binop(acc, rhs, '/', col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn binop(&mut self, lhs: Val, rhs: Val, op: char, col: usize) -> CliResult<Val> {
        match (lhs, rhs) {
            (Val::Fermat(a), Val::Fermat(b)) => {
                let r = match op {
                    '+' => a.checked_add(&b),
                    '-' => a.checked_sub(&b),
                    '*' => a.checked_mul(&b),
                    _ => a.checked_div(&b),
                };
                Ok(Val::Fermat(r.map_err(CliError::from)?))
            }
            (Val::Hyp(a), Val::Hyp(b)) => Ok(Val::Hyp(match op {
                '+' => a.add(&b),
                '-' => a.sub(&b),
                '*' => a.mul(&b),
                _ => {
                    return Err(CliError::parse(
                        col,
                        "the sequence ring has no division; compare with hst/heq instead",
                    ))
                }
            })),
            (a, b) => Err(CliError::parse(
                col,
                format!("cannot apply `{op}` to {} and {}", a.kind(), b.kind()),
            )),
        }
    }

    fn unary(&mut self) -> CliResult<Val> {
        if self.peek() == Some(&Tok::Minus) {
            let col = self.column();
            self.pos += 1;
            let v = self.unary()?;
            return match v {
                Val::Fermat(x) => Ok(Val::Fermat(x.negate())),
                Val::Hyp(h) => Ok(Val::Hyp(h.neg())),
                other => Err(CliError::parse(col, format!("cannot negate {}", other.kind()))),
            };
        }
        self.power()
    }

    fn power(&mut self) -> CliResult<Val> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let col = self.column();
        self.pos += 1;
        let exponent = self.parse_exponent()?;
        match (base, exponent) {
            (Val::Fermat(x), Exponent::Nat(k)) => Ok(Val::Fermat(x.pow_int(k))),
            (Val::Fermat(x), Exponent::Rational(p)) => {
                if p.is_integer() && !p.is_negative() {
                    let k = p.floor_u64().unwrap_or(0) as u32;
                    return Ok(Val::Fermat(x.pow_int(k)));
                }
                if p.is_integer() && p.is_negative() {
                    let k = p.abs().floor_u64().unwrap_or(0) as u32;
                    let inv = x.invert().map_err(CliError::from)?;
                    return Ok(Val::Fermat(inv.pow_int(k)));
                }
                // Fractional powers apply to basic infinitesimals dt_a.
                let unit_dt = x.st().is_zero()
                    && x.terms().len() == 1
                    && x.terms()[0].coef() == &Scalar::one(x.mode());
                if !unit_dt {
                    return Err(CliError::parse(
                        col,
                        "fractional powers are defined for basic infinitesimals dt_a only",
                    ));
                }
                let order = x.terms()[0].order().clone();
                Ok(Val::Fermat(FermatReal::term_pow(order, p).map_err(CliError::from)?))
            }
            (Val::Hyp(h), Exponent::Nat(k)) => {
                let mut acc = Hyper::constant(Rational::one());
                for _ in 0..k {
                    acc = acc.mul(&h);
                }
                Ok(Val::Hyp(acc))
            }
            (other, _) => Err(CliError::parse(col, format!("cannot raise {}", other.kind()))),
        }
    }

    fn parse_exponent(&mut self) -> CliResult<Exponent> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Nat(d)) => {
                let k: u32 = d.parse().map_err(|_| CliError::parse(col, "exponent too large"))?;
                Ok(Exponent::Nat(k))
            }
            Some(Tok::LParen) => {
                let mut negative = false;
                if self.peek() == Some(&Tok::Minus) {
                    negative = true;
                    self.pos += 1;
                }
                let r = self.rational_literal()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Exponent::Rational(if negative { -r } else { r }))
            }
            _ => Err(CliError::parse(col, "expected an exponent")),
        }
    }

    fn rational_literal(&mut self) -> CliResult<Rational> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Nat(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let col2 = self.column();
                    match self.bump() {
                        Some(Tok::Nat(d)) => {
                            let num: Rational =
                                n.parse().map_err(|_| CliError::parse(col, "bad numerator"))?;
                            let den: Rational =
                                d.parse().map_err(|_| CliError::parse(col2, "bad denominator"))?;
                            if den.is_zero() {
                                return Err(CliError::parse(col2, "zero denominator"));
                            }
                            Ok(num / den)
                        }
                        _ => Err(CliError::parse(col2, "expected a denominator")),
                    }
                } else {
                    n.parse().map_err(|_| CliError::parse(col, "bad number"))
                }
            }
            Some(Tok::Dec(t)) => parse_rational_literal(&t).map_err(CliError::from),
            _ => Err(CliError::parse(col, "expected a number")),
        }
    }

    fn scalar_literal(&self, r: Rational) -> FermatReal {
        if self.force_exact > 0 || self.session.mode == Mode::Exact {
            FermatReal::from_rational(r)
        } else {
            FermatReal::from_scalar(Scalar::Approx(r.to_f64()))
        }
    }

    fn atom(&mut self) -> CliResult<Val> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Nat(d)) => {
                let r: Rational = d.parse().map_err(|_| CliError::parse(col, "bad number"))?;
                Ok(Val::Fermat(self.scalar_literal(r)))
            }
            Some(Tok::Dec(t)) => {
                let r = parse_rational_literal(&t)?;
                Ok(Val::Fermat(self.scalar_literal(r)))
            }
            Some(Tok::DtSub(sub)) => {
                let order: Rational =
                    sub.parse().map_err(|_| CliError::parse(col, "bad dt order"))?;
                Ok(Val::Fermat(
                    FermatReal::dt_in_mode(order, self.session.mode).map_err(CliError::from)?,
                ))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident_atom(&name, col),
            _ => Err(CliError::parse(col, "expected a value")),
        }
    }

    fn ident_atom(&mut self, name: &str, col: usize) -> CliResult<Val> {
        match name {
            "dt" => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    self.force_exact += 1;
                    let arg = self.expr()?;
                    self.force_exact -= 1;
                    self.expect(Tok::RParen, "`)`")?;
                    let order = self.exact_rational(arg, col)?;
                    return Ok(Val::Fermat(
                        FermatReal::dt_in_mode(order, self.session.mode)
                            .map_err(CliError::from)?,
                    ));
                }
                Ok(Val::Fermat(
                    FermatReal::dt_in_mode(Rational::one(), self.session.mode)
                        .map_err(CliError::from)?,
                ))
            }
            "st" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Fermat(FermatReal::from_scalar(x.st().clone())))
            }
            "order" => {
                let x = self.unary_fermat_call(col)?;
                let w = x.order().map_err(CliError::from)?.clone();
                Ok(Val::Fermat(self.scalar_literal(w)))
            }
            "decomposition" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Fermat(x))
            }
            "abs" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Fermat(smooth::ext_abs(&x)))
            }
            "sin" | "cos" | "exp" | "log" | "sqrt" => {
                let x = self.unary_fermat_call(col)?;
                let f = primitive_expr(name);
                Ok(Val::Fermat(smooth::ext_apply(&f, &[x]).map_err(CliError::from)?))
            }
            "isreal" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Bool(x.is_real()))
            }
            "isinfinitesimal" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Bool(x.is_infinitesimal()))
            }
            "isinvertible" => {
                let x = self.unary_fermat_call(col)?;
                Ok(Val::Bool(x.is_invertible()))
            }
            "ext" => self.ext_call(col),
            "inline" => {
                self.expect(Tok::LParen, "`(`")?;
                let src_col = self.column();
                let src = match self.bump() {
                    Some(Tok::Quote(s)) => s,
                    _ => return Err(CliError::parse(src_col, "inline expects a quoted expression")),
                };
                self.expect(Tok::RParen, "`)`")?;
                let mut vars = Vec::new();
                let expr = smooth::parse_with_vars(&src, &mut vars).map_err(CliError::from)?;
                if vars.is_empty() {
                    vars.push("x".to_string());
                }
                Ok(Val::Func(NamedFunc { expr, var_names: vars }))
            }
            "seq" => {
                self.expect(Tok::LParen, "`(`")?;
                let value = self.nexpr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Val::Hyp(value.finalize(col)?))
            }
            "hst" => {
                self.expect(Tok::LParen, "`(`")?;
                let v = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let h = self.as_hyper(v, col)?;
                let r = st_hyper(&h);
                Ok(Val::Fermat(self.scalar_literal(r)))
            }
            "heq" | "hle" => {
                self.expect(Tok::LParen, "`(`")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let a = self.as_hyper(a, col)?;
                let b = self.as_hyper(b, col)?;
                let o = &mut self.session.oracle;
                Ok(Val::Bool(if name == "heq" {
                    hyper_eq(o, &a, &b)
                } else {
                    hyper_le(o, &a, &b)
                }))
            }
            "dominant" => {
                self.expect(Tok::LParen, "`(`")?;
                let set = self.set_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Val::Verdict(self.session.oracle.dominant(&set)))
            }
            "member" => {
                self.expect(Tok::LParen, "`(`")?;
                let v = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let set = self.open_set_literal()?;
                self.expect(Tok::RParen, "`)`")?;
                match v {
                    Val::Fermat(x) => Ok(Val::Bool(set.member_ext(&x))),
                    Val::Hyp(h) => {
                        let flagged = open_set_to_real_set(&set);
                        let o = &mut self.session.oracle;
                        Ok(Val::Bool(continuum::ultrapower::star_member(o, &h, &flagged)))
                    }
                    other => Err(CliError::parse(col, format!("member expects a value, got {}", other.kind()))),
                }
            }
            "plot" => Err(CliError::parse(
                col,
                "plot is a statement: plot(delta, x) > file",
            )),
            "n" => Err(CliError::parse(col, "`n` is only meaningful inside seq(...)")),
            _ => match self.session.lookup(name) {
                Some(Binding::Value(x)) => Ok(Val::Fermat(x.clone())),
                Some(Binding::Hyp(h)) => Ok(Val::Hyp(h.clone())),
                Some(Binding::Func(f)) => Ok(Val::Func(f.clone())),
                None => Err(CliError::parse(col, format!("unknown name `{name}`"))),
            },
        }
    }

    fn unary_fermat_call(&mut self, col: usize) -> CliResult<FermatReal> {
        self.expect(Tok::LParen, "`(`")?;
        let v = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        self.as_fermat(v, col)
    }

    fn ext_call(&mut self, _col: usize) -> CliResult<Val> {
        self.expect(Tok::LParen, "`(`")?;
        let f_col = self.column();
        let func: NamedFunc = match self.bump() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "sin" | "cos" | "exp" | "log" | "sqrt" => NamedFunc {
                    expr: primitive_expr(&name),
                    var_names: vec!["x".to_string()],
                },
                other => match self.session.lookup(other) {
                    Some(Binding::Func(f)) => f.clone(),
                    _ => {
                        return Err(CliError::parse(
                            f_col,
                            format!("`{other}` is not a function"),
                        ))
                    }
                },
            },
            Some(Tok::Quote(src)) => {
                let mut vars = Vec::new();
                let expr = smooth::parse_with_vars(&src, &mut vars).map_err(CliError::from)?;
                NamedFunc { expr, var_names: vars }
            }
            _ => return Err(CliError::parse(f_col, "expected a function name or 'expr'")),
        };
        let mut args = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            let v = self.expr()?;
            args.push(self.as_fermat(v, f_col)?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.is_empty() {
            return Err(CliError::parse(f_col, "ext needs at least one argument"));
        }
        Ok(Val::Fermat(smooth::ext_apply(&func.expr, &args).map_err(CliError::from)?))
    }

    fn as_fermat(&self, v: Val, col: usize) -> CliResult<FermatReal> {
        match v {
            Val::Fermat(x) => Ok(x),
            other => Err(CliError::parse(col, format!("expected a fermat real, got {}", other.kind()))),
        }
    }

    fn as_hyper(&self, v: Val, col: usize) -> CliResult<Hyper> {
        match v {
            Val::Hyp(h) => Ok(h),
            other => Err(CliError::parse(col, format!("expected a sequence, got {}", other.kind()))),
        }
    }

    fn exact_rational(&self, v: Val, col: usize) -> CliResult<Rational> {
        match v {
            Val::Fermat(x) if x.is_real() => match x.st() {
                Scalar::Exact(r) => Ok(r.clone()),
                Scalar::Approx(_) => {
                    Err(CliError::parse(col, "expected an exact rational argument"))
                }
            },
            other => Err(CliError::parse(col, format!("expected a rational, got {}", other.kind()))),
        }
    }

    // ---- seq(...) sub-language: Laurent arithmetic over (n+1) ----------

    fn nexpr(&mut self) -> CliResult<PwLaurent> {
        let mut acc = self.nterm()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.nterm()?;
                    acc = acc.zip(&rhs, Laurent::add);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.nterm()?;
                    acc = acc.zip(&rhs, |a, b| a.add(&b.neg()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn nterm(&mut self) -> CliResult<PwLaurent> {
        let mut acc = self.nfactor()?;
        loop {
            let col = self.column();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.nfactor()?;
                    acc = acc.zip(&rhs, Laurent::mul);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.nfactor()?;
                    acc = acc.try_zip(&rhs, |a, b| {
                        let inv = b.recip_monomial().ok_or_else(|| {
                            CliError::parse(col, "divisor must be a monomial in (n+1)")
                        })?;
                        Ok(a.mul(&inv))
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn nfactor(&mut self) -> CliResult<PwLaurent> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let v = self.nfactor()?;
            return Ok(v.map(Laurent::neg));
        }
        self.npower()
    }

    fn npower(&mut self) -> CliResult<PwLaurent> {
        let base = self.natom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let col = self.column();
        self.pos += 1;
        match self.peek().cloned() {
            Some(Tok::Nat(d)) => {
                self.pos += 1;
                let k: u32 = d.parse().map_err(|_| CliError::parse(col, "exponent too large"))?;
                Ok(base.pow_nat(k))
            }
            Some(Tok::Ident(id)) if id == "n" => {
                self.pos += 1;
                // (-1)^n (or 1^n): the alternating split.
                let constant = base
                    .as_constant()
                    .ok_or_else(|| CliError::parse(col, "`^n` applies to -1 only"))?;
                if constant == Rational::from_int(-1) {
                    Ok(PwLaurent::alternating())
                } else if constant == Rational::one() {
                    Ok(PwLaurent::constant(Rational::one()))
                } else {
                    Err(CliError::parse(col, "`^n` applies to -1 only"))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let mut negative = false;
                if self.peek() == Some(&Tok::Minus) {
                    negative = true;
                    self.pos += 1;
                }
                let r = self.rational_literal()?;
                self.expect(Tok::RParen, "`)`")?;
                let p = if negative { -r } else { r };
                base.try_map(|l| {
                    l.pow_rational(&p)
                        .ok_or_else(|| CliError::parse(col, "fractional power needs a perfect-power monomial"))
                })
            }
            _ => Err(CliError::parse(col, "expected an exponent")),
        }
    }

    fn natom(&mut self) -> CliResult<PwLaurent> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Nat(d)) => {
                let r: Rational = d.parse().map_err(|_| CliError::parse(col, "bad number"))?;
                Ok(PwLaurent::constant(r))
            }
            Some(Tok::Dec(t)) => Ok(PwLaurent::constant(parse_rational_literal(&t)?)),
            Some(Tok::Ident(id)) if id == "n" => Ok(PwLaurent::index()),
            Some(Tok::LParen) => {
                let inner = self.nexpr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(CliError::parse(col, "expected a number, `n`, or `(`")),
        }
    }

    // ---- dominant(...) set expressions ---------------------------------

    fn set_expr(&mut self) -> CliResult<EpSet> {
        let mut acc = self.set_term()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            acc = acc.union(&self.set_term()?);
        }
        Ok(acc)
    }

    fn set_term(&mut self) -> CliResult<EpSet> {
        let mut acc = self.set_factor()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            acc = acc.intersect(&self.set_factor()?);
        }
        Ok(acc)
    }

    fn set_factor(&mut self) -> CliResult<EpSet> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            return Ok(self.set_factor()?.complement());
        }
        let col = self.column();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.set_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "evens" => Ok(EpSet::evens()),
                "odds" => Ok(EpSet::odds()),
                "full" => Ok(EpSet::full()),
                "empty" => Ok(EpSet::empty()),
                "per" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let m = self.nat(col)?;
                    self.expect(Tok::RParen, "`)`")?;
                    let residues = self.nat_braces()?;
                    EpSet::from_parts(Vec::new(), m, residues.into_iter().collect())
                        .map_err(CliError::from)
                }
                "cofinite" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let n = self.nat(col)?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(EpSet::from_threshold(n))
                }
                "finite" => {
                    let members = self.nat_braces()?;
                    Ok(EpSet::from_finite(&members))
                }
                other => Err(CliError::parse(col, format!("unknown set `{other}`"))),
            },
            _ => Err(CliError::parse(col, "expected a set")),
        }
    }

    fn nat(&mut self, col: usize) -> CliResult<u64> {
        match self.bump() {
            Some(Tok::Nat(d)) => d.parse().map_err(|_| CliError::parse(col, "number too large")),
            _ => Err(CliError::parse(col, "expected a natural number")),
        }
    }

    fn nat_braces(&mut self) -> CliResult<Vec<u64>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let col = self.column();
            out.push(self.nat(col)?);
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => return Ok(out),
                _ => return Err(CliError::parse(self.column(), "expected `,` or `}`")),
            }
        }
    }

    // ---- open-set literals ----------------------------------------------

    fn open_set_literal(&mut self) -> CliResult<OpenSet> {
        if self.peek() == Some(&Tok::LBrace) {
            self.pos += 1;
            self.expect(Tok::RBrace, "`}`")?;
            return Ok(OpenSet::empty());
        }
        let mut intervals = vec![self.interval_literal()?];
        while matches!(self.peek(), Some(Tok::Ident(u)) if u == "u") {
            self.pos += 1;
            intervals.push(self.interval_literal()?);
        }
        Ok(OpenSet::from_intervals(intervals))
    }

    fn interval_literal(&mut self) -> CliResult<Interval> {
        self.expect(Tok::LParen, "`(`")?;
        let lo = self.endpoint_literal()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.endpoint_literal()?;
        self.expect(Tok::RParen, "`)`")?;
        Interval::new(lo, hi).map_err(CliError::from)
    }

    fn endpoint_literal(&mut self) -> CliResult<Endpoint> {
        let col = self.column();
        let mut negative = false;
        if self.peek() == Some(&Tok::Minus) {
            negative = true;
            self.pos += 1;
        }
        match self.peek().cloned() {
            Some(Tok::Ident(id)) if id == "inf" => {
                self.pos += 1;
                Ok(if negative { Endpoint::NegInf } else { Endpoint::PosInf })
            }
            _ => {
                let r = self.rational_literal()?;
                Ok(Endpoint::Finite(if negative { -r } else { r }))
            }
        }
        .map_err(|e: CliError| {
            CliError::parse(col, format!("bad endpoint: {e}"))
        })
    }
}

enum Cmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

enum Exponent {
    Nat(u32),
    Rational(Rational),
}

fn primitive_expr(name: &str) -> Arc<Expr> {
    let x = Expr::var(0);
    match name {
        "sin" => Expr::sin(x),
        "cos" => Expr::cos(x),
        "exp" => Expr::exp(x),
        "log" => Expr::log(x),
        _ => Expr::sqrt(x),
    }
}

fn open_set_to_real_set(set: &OpenSet) -> RealSet {
    use continuum::ultrapower::{Lower, RealInterval, Upper};
    RealSet::from_intervals(
        set.intervals()
            .iter()
            .map(|iv| RealInterval {
                lo: match iv.lo() {
                    Endpoint::NegInf => Lower::NegInf,
                    Endpoint::Finite(r) => Lower::At(r.clone(), false),
                    Endpoint::PosInf => Lower::At(Rational::zero(), false),
                },
                hi: match iv.hi() {
                    Endpoint::PosInf => Upper::PosInf,
                    Endpoint::Finite(r) => Upper::At(r.clone(), false),
                    Endpoint::NegInf => Upper::At(Rational::zero(), false),
                },
            })
            .collect(),
    )
}

/// Formal Laurent polynomial in `t = n+1` with rational exponents.
#[derive(Clone, Debug)]
struct Laurent(BTreeMap<Rational, Rational>);

impl Laurent {
    fn constant(r: Rational) -> Laurent {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(Rational::zero(), r);
        }
        Laurent(m)
    }

    fn add(&self, other: &Laurent) -> Laurent {
        let mut m = self.0.clone();
        for (e, c) in &other.0 {
            let slot = m.entry(e.clone()).or_insert_with(Rational::zero);
            *slot = &*slot + c;
        }
        m.retain(|_, c| !c.is_zero());
        Laurent(m)
    }

    fn neg(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut m: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                let e = e1 + e2;
                let slot = m.entry(e).or_insert_with(Rational::zero);
                *slot = &*slot + &(c1 * c2);
            }
        }
        m.retain(|_, c| !c.is_zero());
        Laurent(m)
    }

    fn as_monomial(&self) -> Option<(&Rational, &Rational)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    fn recip_monomial(&self) -> Option<Laurent> {
        let (e, c) = self.as_monomial()?;
        let mut m = BTreeMap::new();
        m.insert(-e, c.recip());
        Some(Laurent(m))
    }

    fn pow_nat(&self, k: u32) -> Laurent {
        let mut acc = Laurent::constant(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn pow_rational(&self, p: &Rational) -> Option<Laurent> {
        let (e, c) = self.as_monomial()?;
        let coef = c.pow_rational_exact(p)?;
        let mut m = BTreeMap::new();
        m.insert(e * p, coef);
        Some(Laurent(m))
    }
}

/// Piecewise Laurent value over an eventually periodic partition.
#[derive(Clone, Debug)]
struct PwLaurent(Vec<(EpSet, Laurent)>);

impl PwLaurent {
    fn constant(r: Rational) -> PwLaurent {
        PwLaurent(vec![(EpSet::full(), Laurent::constant(r))])
    }

    /// `n` itself: `t - 1` with `t = n+1`.
    fn index() -> PwLaurent {
        let mut m = BTreeMap::new();
        m.insert(Rational::one(), Rational::one());
        m.insert(Rational::zero(), Rational::from_int(-1));
        PwLaurent(vec![(EpSet::full(), Laurent(m))])
    }

    /// `(-1)^n`: +1 on evens, -1 on odds.
    fn alternating() -> PwLaurent {
        PwLaurent(vec![
            (EpSet::evens(), Laurent::constant(Rational::one())),
            (EpSet::odds(), Laurent::constant(Rational::from_int(-1))),
        ])
    }

    fn as_constant(&self) -> Option<Rational> {
        if self.0.len() != 1 {
            return None;
        }
        let l = &self.0[0].1;
        if l.0.is_empty() {
            return Some(Rational::zero());
        }
        let (e, c) = l.as_monomial()?;
        if e.is_zero() {
            Some(c.clone())
        } else {
            None
        }
    }

    fn map(&self, f: impl Fn(&Laurent) -> Laurent) -> PwLaurent {
        PwLaurent(self.0.iter().map(|(s, l)| (s.clone(), f(l))).collect())
    }

    fn try_map(
        &self,
        f: impl Fn(&Laurent) -> CliResult<Laurent>,
    ) -> CliResult<PwLaurent> {
        let mut out = Vec::new();
        for (s, l) in &self.0 {
            out.push((s.clone(), f(l)?));
        }
        Ok(PwLaurent(out))
    }

    fn zip(&self, other: &PwLaurent, f: impl Fn(&Laurent, &Laurent) -> Laurent) -> PwLaurent {
        let mut out = Vec::new();
        for (sa, la) in &self.0 {
            for (sb, lb) in &other.0 {
                let set = sa.intersect(sb);
                if !set.is_empty() {
                    out.push((set, f(la, lb)));
                }
            }
        }
        PwLaurent(out)
    }

    fn try_zip(
        &self,
        other: &PwLaurent,
        f: impl Fn(&Laurent, &Laurent) -> CliResult<Laurent>,
    ) -> CliResult<PwLaurent> {
        let mut out = Vec::new();
        for (sa, la) in &self.0 {
            for (sb, lb) in &other.0 {
                let set = sa.intersect(sb);
                if !set.is_empty() {
                    out.push((set, f(la, lb)?));
                }
            }
        }
        Ok(PwLaurent(out))
    }

    fn pow_nat(&self, k: u32) -> PwLaurent {
        self.map(|l| l.pow_nat(k))
    }

    /// Converts into a symbolic Cauchy sequence: every branch must contain
    /// only non-positive powers of `(n+1)`.
    fn finalize(self, col: usize) -> CliResult<Hyper> {
        let mut branches = Vec::new();
        for (set, laurent) in self.0 {
            let mut constant = Rational::zero();
            let mut terms = Vec::new();
            for (e, c) in &laurent.0 {
                if e.is_zero() {
                    constant = c.clone();
                } else if e.is_negative() {
                    terms.push((c.clone(), -e));
                } else {
                    return Err(CliError::parse(
                        col,
                        "sequence diverges: positive powers of (n+1) remain",
                    ));
                }
            }
            branches.push((set, PowerSum::new(constant, terms)));
        }
        let seq = SeqExpr::piecewise(branches).map_err(CliError::from)?;
        Ok(Hyper::from_seq(seq))
    }
}
