//! Tokenizer for the calculator language.

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Nat(String),
    Dec(String),
    Ident(String),
    /// `dt_<p>` or `dt_<p>/<q>`: a basic infinitesimal with its order
    /// subscript, lexed as one token.
    DtSub(String),
    Quote(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Amp,
    Pipe,
    Bang,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: Tok,
    pub column: usize,
}

pub fn lex(src: &str) -> CliResult<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let column = i + 1;
        let c = bytes[i] as char;
        let mut push = |kind: Tok, advance: usize| {
            out.push(Token { kind, column });
            advance
        };
        i += match c {
            ' ' | '\t' | '\r' | '\n' => 1,
            '+' => push(Tok::Plus, 1),
            '-' => push(Tok::Minus, 1),
            '*' => push(Tok::Star, 1),
            '/' => push(Tok::Slash, 1),
            '^' => push(Tok::Caret, 1),
            '(' => push(Tok::LParen, 1),
            ')' => push(Tok::RParen, 1),
            '{' => push(Tok::LBrace, 1),
            '}' => push(Tok::RBrace, 1),
            ',' => push(Tok::Comma, 1),
            '&' => push(Tok::Amp, 1),
            '|' => push(Tok::Pipe, 1),
            '!' => push(Tok::Bang, 1),
            '=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push(Tok::Eq, 2)
                } else {
                    push(Tok::Assign, 1)
                }
            }
            '~' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push(Tok::Ne, 2)
                } else {
                    return Err(CliError::parse(column, "expected `~=`"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push(Tok::Le, 2)
                } else {
                    push(Tok::Lt, 2 - 1)
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push(Tok::Ge, 2)
                } else {
                    push(Tok::Gt, 1)
                }
            }
            '\'' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j] != b'\'' {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(CliError::parse(column, "unterminated quote"));
                }
                out.push(Token { kind: Tok::Quote(src[start..j].to_string()), column });
                j + 1 - i
            }
            '0'..='9' => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let mut decimal = false;
                if j < bytes.len()
                    && bytes[j] == b'.'
                    && bytes.get(j + 1).is_some_and(u8::is_ascii_digit)
                {
                    decimal = true;
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let text = src[start..j].to_string();
                out.push(Token {
                    kind: if decimal { Tok::Dec(text) } else { Tok::Nat(text) },
                    column,
                });
                j - i
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let word = &src[start..j];
                // dt_<p>[/<q>] is one token: the order subscript of a basic
                // infinitesimal (so `dt_6/5` is not a division).
                if word == "dt" && bytes.get(j) == Some(&b'_') {
                    let mut k = j + 1;
                    let digits_from = k;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    if k == digits_from {
                        return Err(CliError::parse(k + 1, "expected digits after `dt_`"));
                    }
                    if bytes.get(k) == Some(&b'/')
                        && bytes.get(k + 1).is_some_and(u8::is_ascii_digit)
                    {
                        k += 1;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                    out.push(Token {
                        kind: Tok::DtSub(src[j + 1..k].to_string()),
                        column,
                    });
                    k - i
                } else {
                    out.push(Token { kind: Tok::Ident(word.to_string()), column });
                    j - i
                }
            }
            other => return Err(CliError::parse(column, format!("unexpected character `{other}`"))),
        };
    }
    Ok(out)
}
