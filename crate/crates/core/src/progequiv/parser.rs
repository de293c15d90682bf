//! Parser for programs.
//!
//! ```text
//! program := [expr (';' expr)* [';']]
//! expr    := 'if' cond 'then' expr 'else' expr | 'fail' | '(' expr ')' | poly
//! cond    := conj ('|' conj)*
//! conj    := neg ('&' neg)*
//! neg     := '!' neg | '(' cond ')' | poly '=' poly
//! ```
//!
//! Polynomials use the polynomial grammar without `^`.  A `(` in condition
//! position is read as a parenthesized condition when that parse succeeds
//! and otherwise as the start of a polynomial.

use super::ast::{Cond, Expr};
use crate::mpoly::parse::{lex, var_table, ParseError, PolyParser, Tok};
use crate::mpoly::MPoly;
use crate::ff::FieldCtx;

struct ProgParser<'a> {
    p: PolyParser<'a>,
}

impl ProgParser<'_> {
    fn keyword(&mut self, kw: &str) -> bool {
        if self.p.at_keyword(kw) {
            self.p.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.keyword(kw) {
            Ok(())
        } else {
            Err(self.p.error(format!("expected `{kw}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.keyword("if") {
            let c = self.cond()?;
            self.expect_keyword("then")?;
            let t = self.expr()?;
            self.expect_keyword("else")?;
            let e = self.expr()?;
            return Ok(Expr::if_(c, t, e));
        }
        if self.keyword("fail") {
            return Ok(Expr::Fail);
        }
        if self.p.peek() == Some(&Tok::LParen) {
            let next = self.p.toks.get(self.p.pos + 1).map(|(t, _)| t);
            if matches!(next, Some(Tok::Name(n)) if n == "if" || n == "fail") {
                self.p.pos += 1;
                let e = self.expr()?;
                self.p.expect(&Tok::RParen, "`)`")?;
                return Ok(e);
            }
        }
        Ok(Expr::Poly(self.p.expr()?))
    }

    fn cond(&mut self) -> Result<Cond, ParseError> {
        let mut acc = self.conj()?;
        while self.p.eat(&Tok::Pipe) {
            acc = Cond::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Cond, ParseError> {
        let mut acc = self.neg()?;
        while self.p.eat(&Tok::Amp) {
            acc = Cond::and(acc, self.neg()?);
        }
        Ok(acc)
    }

    fn neg(&mut self) -> Result<Cond, ParseError> {
        if self.p.eat(&Tok::Bang) {
            return Ok(Cond::not(self.neg()?));
        }
        if self.p.peek() == Some(&Tok::LParen) {
            let save = self.p.pos;
            self.p.pos += 1;
            if let Ok(c) = self.cond() {
                if self.p.eat(&Tok::RParen) && self.p.peek() != Some(&Tok::Eq) {
                    return Ok(c);
                }
            }
            self.p.pos = save;
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Cond, ParseError> {
        let lhs = self.p.expr()?;
        self.p.expect(&Tok::Eq, "`=` in a condition")?;
        let rhs = self.p.expr()?;
        Ok(Cond::Atom(&lhs - &rhs))
    }
}

/// Parses `text` as a program body over the variables `names`.
pub(crate) fn parse_body(ctx: &FieldCtx, names: &[String], text: &str) -> Result<Vec<Expr>, ParseError> {
    let toks = lex(text)?;
    let vars = var_table(names);
    let mut pp = ProgParser {
        p: PolyParser {
            toks: &toks,
            pos: 0,
            end: text.len(),
            ctx,
            vars: &vars,
            nvars: names.len(),
            allow_pow: false,
        },
    };
    let mut body = Vec::new();
    while pp.p.peek().is_some() {
        body.push(pp.expr()?);
        if !pp.p.eat(&Tok::Semi) {
            break;
        }
    }
    if pp.p.pos != toks.len() {
        return Err(pp.p.error("expected `;` or end of program"));
    }
    Ok(body)
}

/// Parses polynomials separated by `;`.
pub(crate) fn parse_poly_list(ctx: &FieldCtx, names: &[String], text: &str) -> Result<Vec<MPoly>, ParseError> {
    let body = parse_body(ctx, names, text)?;
    let toks = lex(text)?;
    body.into_iter()
        .map(|e| match e {
            Expr::Poly(p) => Ok(p),
            _ => {
                let at = toks
                    .iter()
                    .find(|(t, _)| matches!(t, Tok::Name(n) if n == "if" || n == "fail"))
                    .map_or(0, |(_, o)| *o);
                Err(ParseError::new(at, "arithmetic program may not contain `if` or `fail`"))
            }
        })
        .collect()
}
