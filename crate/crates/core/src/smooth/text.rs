//! Text form of smooth-function expressions: infix `+ - * / ^`, function
//! application `sin(x)`, variables `x1..xd` (plain `x` in one dimension),
//! rational literals `p/q`. Printing and parsing round-trip through the
//! smart constructors.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::expr::Expr;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

/// Renders with default variable names (`x` or `x1..xd`).
pub fn to_text(e: &Arc<Expr>) -> String {
    let dim = e.dimension();
    let names: Vec<String> = if dim <= 1 {
        alloc::vec!["x".to_string()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    };
    to_text_named(e, &names)
}

/// Renders with explicit variable names.
pub fn to_text_named(e: &Arc<Expr>, names: &[String]) -> String {
    let mut out = String::new();
    write_expr(e, names, PREC_ADD, &mut out);
    out
}

fn write_expr(e: &Arc<Expr>, names: &[String], min_prec: u8, out: &mut String) {
    let prec = match e.as_ref() {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(..) => PREC_ADD,
        Expr::PowInt(..) => PREC_POW,
        Expr::Const(r) if r.is_negative() => PREC_ADD,
        // A fraction literal prints as `p/q`, which binds like a division.
        Expr::Const(r) if !r.is_integer() => PREC_MUL,
        _ => PREC_ATOM,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match e.as_ref() {
        Expr::Const(r) => out.push_str(&r.to_string()),
        Expr::Var(i) => out.push_str(names.get(*i).map(String::as_str).unwrap_or("x?")),
        Expr::Add(a, b) => {
            write_expr(a, names, PREC_ADD, out);
            out.push_str(" + ");
            write_expr(b, names, PREC_ADD + 1, out);
        }
        Expr::Sub(a, b) => {
            write_expr(a, names, PREC_ADD, out);
            out.push_str(" - ");
            write_expr(b, names, PREC_ADD + 1, out);
        }
        Expr::Mul(a, b) => {
            write_expr(a, names, PREC_MUL, out);
            out.push('*');
            write_expr(b, names, PREC_MUL + 1, out);
        }
        Expr::Div(a, b) => {
            write_expr(a, names, PREC_MUL, out);
            out.push('/');
            write_expr(b, names, PREC_MUL + 1, out);
        }
        Expr::Neg(a) => {
            out.push('-');
            write_expr(a, names, PREC_POW, out);
        }
        Expr::PowInt(a, k) => {
            write_expr(a, names, PREC_ATOM, out);
            out.push('^');
            out.push_str(&k.to_string());
        }
        Expr::Sin(a) => write_call("sin", a, names, out),
        Expr::Cos(a) => write_call("cos", a, names, out),
        Expr::Exp(a) => write_call("exp", a, names, out),
        Expr::Log(a) => write_call("log", a, names, out),
        Expr::Sqrt(a) => write_call("sqrt", a, names, out),
    }
    if parens {
        out.push(')');
    }
}

fn write_call(name: &str, arg: &Arc<Expr>, names: &[String], out: &mut String) {
    out.push_str(name);
    out.push('(');
    write_expr(arg, names, PREC_ADD, out);
    out.push(')');
}

/// Parses with the default naming scheme: `x` is the sole variable, or
/// `x1..xd` index into dimensions.
pub fn parse_expr(src: &str) -> Result<Arc<Expr>> {
    let mut vars: Vec<String> = Vec::new();
    let e = parse_with_vars(src, &mut vars)?;
    // Default names must be the standard scheme.
    for (i, name) in vars.iter().enumerate() {
        let ok = name == "x" && vars.len() == 1
            || name
                .strip_prefix('x')
                .and_then(|digits| digits.parse::<usize>().ok())
                .is_some_and(|k| k == i + 1);
        if !ok {
            return Err(Error::Parse {
                column: 1,
                message: format!("unknown variable `{name}` (expected x or x1..xd)"),
            });
        }
    }
    Ok(e)
}

/// Parses, collecting variable names in first-appearance order. `x` and
/// `x<k>` map onto fixed indices; any other identifier that is not a
/// function name becomes the next free variable.
pub fn parse_with_vars(src: &str, vars: &mut Vec<String>) -> Result<Arc<Expr>> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0, vars };
    let e = p.expression()?;
    if p.pos < p.tokens.len() {
        return Err(Error::Parse {
            column: p.tokens[p.pos].column,
            message: "unexpected trailing input".to_string(),
        });
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: Tok,
    pub column: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let column = i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                out.push(Token { kind: Tok::Plus, column });
                i += 1;
            }
            '-' => {
                out.push(Token { kind: Tok::Minus, column });
                i += 1;
            }
            '*' => {
                out.push(Token { kind: Tok::Star, column });
                i += 1;
            }
            '/' => {
                out.push(Token { kind: Tok::Slash, column });
                i += 1;
            }
            '^' => {
                out.push(Token { kind: Tok::Caret, column });
                i += 1;
            }
            '(' => {
                out.push(Token { kind: Tok::LParen, column });
                i += 1;
            }
            ')' => {
                out.push(Token { kind: Tok::RParen, column });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Int(src[start..i].to_string()),
                    column,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Ident(src[start..i].to_string()),
                    column,
                });
            }
            other => {
                return Err(Error::Parse {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a mut Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or_else(|| self.tokens.last().map(|t| t.column + 1).unwrap_or(1))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.kind.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                column: self.column(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expression(&mut self) -> Result<Arc<Expr>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::add(acc, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Expr>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = Expr::mul(acc, self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.column();
                    let rhs = self.factor()?;
                    if let Expr::Const(r) = rhs.as_ref() {
                        if r.is_zero() {
                            return Err(Error::Parse {
                                column: col,
                                message: "division by zero".to_string(),
                            });
                        }
                    }
                    acc = Expr::div(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Arc<Expr>> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Arc<Expr>> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.column();
            match self.bump() {
                Some(Tok::Int(digits)) => {
                    let k: u32 = digits.parse().map_err(|_| Error::Parse {
                        column: col,
                        message: "exponent too large".to_string(),
                    })?;
                    Ok(Expr::pow_int(base, k))
                }
                _ => Err(Error::Parse {
                    column: col,
                    message: "expected a natural-number exponent".to_string(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Arc<Expr>> {
        let col = self.column();
        match self.bump() {
            Some(Tok::Int(digits)) => {
                let r: Rational = digits.parse().map_err(|_| Error::Parse {
                    column: col,
                    message: "bad integer literal".to_string(),
                })?;
                Ok(Expr::constant(r))
            }
            Some(Tok::LParen) => {
                let inner = self.expression()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "sin" | "cos" | "exp" | "log" | "sqrt" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expression()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "sin" => Expr::sin(arg),
                        "cos" => Expr::cos(arg),
                        "exp" => Expr::exp(arg),
                        "log" => Expr::log(arg),
                        _ => Expr::sqrt(arg),
                    })
                }
                _ => {
                    if let Some(rest) = name.strip_prefix('x') {
                        if let Ok(k) = rest.parse::<usize>() {
                            if k >= 1 {
                                self.intern_at(name.clone(), k - 1);
                                return Ok(Expr::var(k - 1));
                            }
                        } else if rest.is_empty() {
                            self.intern_at(name.clone(), 0);
                            return Ok(Expr::var(0));
                        }
                    }
                    let idx = match self.vars.iter().position(|v| v == &name) {
                        Some(i) => i,
                        None => {
                            self.vars.push(name);
                            self.vars.len() - 1
                        }
                    };
                    Ok(Expr::var(idx))
                }
            },
            _ => Err(Error::Parse {
                column: col,
                message: "expected a number, variable, function or `(`".to_string(),
            }),
        }
    }

    fn intern_at(&mut self, name: String, index: usize) {
        while self.vars.len() <= index {
            let filler = format!("x{}", self.vars.len() + 1);
            self.vars.push(filler);
        }
        self.vars[index] = name;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trips(src: &str) {
        let e = parse_expr(src).unwrap();
        let printed = to_text(&e);
        let back = parse_expr(&printed).unwrap();
        assert_eq!(back, e, "print/parse changed `{src}` -> `{printed}`");
    }

    #[test]
    fn parse_examples() {
        let e = parse_expr("x^2 + 1").unwrap();
        assert_eq!(
            e,
            Expr::add(Expr::pow_int(Expr::var(0), 2), Expr::int(1))
        );
        // rational literal through constant folding
        let half = parse_expr("1/2").unwrap();
        assert_eq!(half, Expr::constant(Rational::new(1, 2)));
        let multi = parse_expr("x1*x2 + x1").unwrap();
        assert_eq!(multi.dimension(), 2);
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "x^2 + 1",
            "sin(x)*cos(x)",
            "1/2*x - 3",
            "-(x + 1)",
            "(x + 1)^3",
            "exp(-x^2)",
            "x1*x2 - x1/x2",
            "sqrt(1 - x^2)",
            "log(x)/x",
        ] {
            round_trips(src);
        }
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("x + ").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 4, .. }));
        let err = parse_expr("x $ 2").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 3, .. }));
        assert!(parse_expr("y + 1").is_err());
        let mut vars = Vec::new();
        assert!(parse_with_vars("y + 1", &mut vars).is_ok());
        assert_eq!(vars, alloc::vec!["y".to_string()]);
    }
}
