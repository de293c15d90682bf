//! Lexer and recursive-descent parser for polynomial expressions.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | '[' INT (',' INT)* ']' | NAME | '(' expr ')'
//! ```
//!
//! The token stream also covers the program language (`;`, `=`, `!`, `&`,
//! `|`), whose parser drives [`PolyParser`] directly.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use super::{MPoly, Monomial};
use crate::ff::FieldCtx;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{msg} at offset {pos}")]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigUint),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eq,
    Bang,
    Amp,
    Pipe,
}

pub(crate) const KEYWORDS: [&str; 4] = ["if", "then", "else", "fail"];

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v: BigUint = text[start..i].parse().expect("digits");
            out.push((Tok::Int(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(text[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            _ => return Err(ParseError::new(start, format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    Ok(out)
}

/// Cursor over a token stream producing polynomials in a fixed variable set.
pub(crate) struct PolyParser<'a> {
    pub toks: &'a [(Tok, usize)],
    pub pos: usize,
    pub end: usize,
    pub ctx: &'a FieldCtx,
    pub vars: &'a FxHashMap<String, usize>,
    pub nvars: usize,
    pub allow_pow: bool,
}

impl<'a> PolyParser<'a> {
    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.offset(), msg)
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == kw)
    }

    pub fn expr(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Star) {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            if !self.allow_pow {
                return Err(self.error("`^` is not available here; write repeated products"));
            }
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Int(v)) => v.to_u32().ok_or_else(|| self.error("exponent too large"))?,
                _ => return Err(self.error("expected an integer exponent")),
            };
            self.pos += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<BigUint, ParseError> {
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                if negative {
                    let p = BigUint::from(self.ctx.p());
                    let r = &v % &p;
                    Ok((&p - r) % p)
                } else {
                    Ok(v)
                }
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn atom(&mut self) -> Result<MPoly, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let c = self.ctx.from_biguint(v);
                self.pos += 1;
                Ok(MPoly::constant(self.ctx, self.nvars, c))
            }
            Some(Tok::LBracket) => {
                let start = self.offset();
                self.pos += 1;
                let mut coeffs = vec![self.int()?];
                while self.eat(&Tok::Comma) {
                    coeffs.push(self.int()?);
                }
                self.expect(&Tok::RBracket, "`]`")?;
                let p = BigUint::from(self.ctx.p());
                let small: Vec<u64> = coeffs
                    .iter()
                    .map(|c| (c % &p).to_u64().unwrap())
                    .collect();
                let c = self
                    .ctx
                    .from_coeffs(&small)
                    .map_err(|e| ParseError::new(start, e.to_string()))?;
                Ok(MPoly::constant(self.ctx, self.nvars, c))
            }
            Some(Tok::Name(n)) => {
                if KEYWORDS.contains(&n.as_str()) {
                    return Err(self.error(format!("unexpected keyword `{n}`")));
                }
                let Some(&i) = self.vars.get(n) else {
                    return Err(self.error(format!("undeclared variable `{n}`")));
                };
                self.pos += 1;
                let mut p = MPoly::zero(self.ctx, self.nvars);
                p.add_term(Monomial::var(self.nvars, i), self.ctx.one());
                Ok(p)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.error("expected a polynomial")),
        }
    }
}

pub(crate) fn var_table(names: &[String]) -> FxHashMap<String, usize> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect()
}

/// Parses one polynomial whose variables are `names` (variable i is
/// `names[i]`).
pub fn parse_poly(ctx: &FieldCtx, names: &[String], text: &str) -> Result<MPoly, ParseError> {
    let toks = lex(text)?;
    let vars = var_table(names);
    let mut p = PolyParser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        ctx,
        vars: &vars,
        nvars: names.len(),
        allow_pow: true,
    };
    let f = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}
