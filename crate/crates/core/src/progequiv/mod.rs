//! Probabilistic programs over finite fields and their equivalence.
//!
//! A program maps values of its input variables to a list of outputs,
//! reading random variables drawn uniformly; `fail` removes an assignment
//! from the sample space.  An equivalence query `P1 | P2 ≈ Q1 | Q2` asks
//! whether, for every input, P1 conditioned on P2 = 0 and Q1 conditioned on
//! Q2 = 0 have the same output distribution, where assignments on which
//! either P1 or Q1 fails are discarded on both sides.

pub mod ast;
mod parser;
mod passes;
mod semantics;

use std::fmt;

use rustc_hash::FxHashSet;

pub use ast::{Cond, Expr};
pub use passes::{
    clause_to_polynomial, cnf, consolidate_failures, eliminate_conditionals, literalize_conditions,
    reduce_query, Clause, FreshVars, Literal,
};
pub use semantics::{distribution, equivalent_at, find_counterexample, universal_equivalence, Distribution, Verdict, Witness};

use crate::ff::{Embedding, FieldCtx, FieldError};
use crate::mpoly::parse::ParseError;
use crate::mpoly::MPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("variables: {0}")]
    Vars(String),
    #[error("{what} needs {needed}, above the cap of {cap}")]
    CapExceeded { what: String, needed: String, cap: u64 },
    #[error("programs are over different fields")]
    FieldMismatch,
}

/// Caps for enumeration and for the size of rewritten programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivLimits {
    /// Search nodes visited by one distribution computation.
    pub max_nodes: u64,
    /// Input tuples examined at one k.
    pub max_inputs: u64,
    pub max_clauses: usize,
    /// Expression nodes after rewriting, and constraint polynomials added.
    pub max_size: usize,
    pub max_field: u64,
}

impl Default for EquivLimits {
    fn default() -> Self {
        EquivLimits {
            max_nodes: 1 << 26,
            max_inputs: 1 << 20,
            max_clauses: 4096,
            max_size: 1 << 16,
            max_field: crate::ff::DEFAULT_MAX_FIELD_SIZE,
        }
    }
}

fn check_vars(inputs: &[String], randoms: &[String]) -> Result<(), ProgError> {
    let mut seen = FxHashSet::default();
    for n in inputs.iter().chain(randoms) {
        if crate::mpoly::parse::KEYWORDS.contains(&n.as_str()) {
            return Err(ProgError::Vars(format!("`{n}` is a keyword")));
        }
        if !seen.insert(n.as_str()) {
            return Err(ProgError::Vars(format!("`{n}` is declared twice")));
        }
    }
    Ok(())
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Map from the variables `from` into `to` by name.
fn var_map(from: &[String], to: &[String]) -> Vec<usize> {
    from.iter()
        .map(|n| to.iter().position(|m| m == n).expect("target variable list covers the source"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    ctx: FieldCtx,
    inputs: Vec<String>,
    randoms: Vec<String>,
    body: Vec<Expr>,
}

impl Program {
    pub fn new(ctx: &FieldCtx, inputs: Vec<String>, randoms: Vec<String>, body: Vec<Expr>) -> Result<Self, ProgError> {
        check_vars(&inputs, &randoms)?;
        let n = inputs.len() + randoms.len();
        let mut polys = Vec::new();
        for e in &body {
            e.polys(&mut polys);
        }
        for p in polys {
            if p.ctx() != ctx {
                return Err(ProgError::FieldMismatch);
            }
            if p.nvars() != n {
                return Err(ProgError::Vars(format!("polynomial in {} variables, program has {n}", p.nvars())));
            }
        }
        Ok(Program {
            ctx: ctx.clone(),
            inputs,
            randoms,
            body,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn randoms(&self) -> &[String] {
        &self.randoms
    }

    pub fn body(&self) -> &[Expr] {
        &self.body
    }

    /// Number of top-level expressions.
    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Inputs followed by randoms; polynomial variable i is `names()[i]`.
    pub fn names(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.randoms).cloned().collect()
    }

    pub fn nvars(&self) -> usize {
        self.inputs.len() + self.randoms.len()
    }

    pub fn fail_count(&self) -> usize {
        self.body.iter().map(Expr::fail_count).sum()
    }

    pub fn conditional_count(&self) -> usize {
        self.body.iter().map(Expr::conditional_count).sum()
    }

    pub fn is_arithmetic(&self) -> bool {
        self.body.iter().all(|e| matches!(e, Expr::Poly(_)))
    }

    pub fn to_arith(&self) -> Option<ArithProgram> {
        let polys = self
            .body
            .iter()
            .map(|e| match e {
                Expr::Poly(p) => Some(p.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(ArithProgram {
            ctx: self.ctx.clone(),
            inputs: self.inputs.clone(),
            randoms: self.randoms.clone(),
            body: polys,
        })
    }

    pub(crate) fn with_body(&self, body: Vec<Expr>) -> Program {
        Program {
            body,
            ..self.clone()
        }
    }

    /// The same program over a superset of its variables.
    pub fn with_vars(&self, inputs: &[String], randoms: &[String]) -> Result<Program, ProgError> {
        check_vars(inputs, randoms)?;
        let to: Vec<String> = inputs.iter().chain(randoms).cloned().collect();
        for n in &self.inputs {
            if !inputs.contains(n) {
                return Err(ProgError::Vars(format!("input `{n}` missing from the new input list")));
            }
        }
        for n in &self.randoms {
            if !randoms.contains(n) {
                return Err(ProgError::Vars(format!("random `{n}` missing from the new random list")));
            }
        }
        let map = var_map(&self.names(), &to);
        let body = self
            .body
            .iter()
            .map(|e| e.map_polys(&mut |p| p.remap_vars(to.len(), &map)))
            .collect();
        Ok(Program {
            ctx: self.ctx.clone(),
            inputs: inputs.to_vec(),
            randoms: randoms.to_vec(),
            body,
        })
    }

    pub fn embed_into(&self, emb: &Embedding) -> Result<Program, ProgError> {
        let mut err = None;
        let body = self
            .body
            .iter()
            .map(|e| {
                e.map_polys(&mut |p| {
                    p.embed_into(emb).unwrap_or_else(|e| {
                        err = Some(e);
                        p.clone()
                    })
                })
            })
            .collect();
        if let Some(e) = err {
            return Err(match e {
                crate::mpoly::PolyError::Field(f) => ProgError::Field(f),
                _ => ProgError::FieldMismatch,
            });
        }
        Ok(Program {
            ctx: emb.target().clone(),
            inputs: self.inputs.clone(),
            randoms: self.randoms.clone(),
            body,
        })
    }
}

/// Parses program text with the given input and random variables.
pub fn parse_program(ctx: &FieldCtx, inputs: &[&str], randoms: &[&str], text: &str) -> Result<Program, ProgError> {
    let (inputs, randoms) = (strings(inputs), strings(randoms));
    check_vars(&inputs, &randoms)?;
    let names: Vec<String> = inputs.iter().chain(&randoms).cloned().collect();
    let body = parser::parse_body(ctx, &names, text)?;
    Program::new(ctx, inputs, randoms, body)
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        let parts: Vec<String> = self.body.iter().map(|e| e.display_with(&names)).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A program made of polynomials only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithProgram {
    ctx: FieldCtx,
    inputs: Vec<String>,
    randoms: Vec<String>,
    body: Vec<MPoly>,
}

impl ArithProgram {
    pub fn new(ctx: &FieldCtx, inputs: Vec<String>, randoms: Vec<String>, body: Vec<MPoly>) -> Result<Self, ProgError> {
        let p = Program::new(ctx, inputs, randoms, body.into_iter().map(Expr::Poly).collect())?;
        Ok(p.to_arith().expect("polynomials only"))
    }

    /// The empty program: no constraint.
    pub fn empty(ctx: &FieldCtx) -> Self {
        ArithProgram {
            ctx: ctx.clone(),
            inputs: Vec::new(),
            randoms: Vec::new(),
            body: Vec::new(),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn randoms(&self) -> &[String] {
        &self.randoms
    }

    pub fn body(&self) -> &[MPoly] {
        &self.body
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.randoms).cloned().collect()
    }

    pub fn to_program(&self) -> Program {
        Program {
            ctx: self.ctx.clone(),
            inputs: self.inputs.clone(),
            randoms: self.randoms.clone(),
            body: self.body.iter().cloned().map(Expr::Poly).collect(),
        }
    }

    pub fn with_vars(&self, inputs: &[String], randoms: &[String]) -> Result<ArithProgram, ProgError> {
        Ok(self.to_program().with_vars(inputs, randoms)?.to_arith().expect("polynomials only"))
    }
}

/// Parses an arithmetic program: polynomials separated by `;`.
pub fn parse_arith_program(
    ctx: &FieldCtx,
    inputs: &[&str],
    randoms: &[&str],
    text: &str,
) -> Result<ArithProgram, ProgError> {
    let (inputs, randoms) = (strings(inputs), strings(randoms));
    check_vars(&inputs, &randoms)?;
    let names: Vec<String> = inputs.iter().chain(&randoms).cloned().collect();
    let body = parser::parse_poly_list(ctx, &names, text)?;
    ArithProgram::new(ctx, inputs, randoms, body)
}

impl fmt::Display for ArithProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_program(), f)
    }
}

/// `p1 | p2 ≈ q1 | q2`.  All four programs are stored over the same
/// variables: the inputs and randoms of all of them, in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivQuery {
    pub p1: Program,
    pub p2: ArithProgram,
    pub q1: Program,
    pub q2: ArithProgram,
}

impl EquivQuery {
    pub fn new(p1: Program, p2: ArithProgram, q1: Program, q2: ArithProgram) -> Result<Self, ProgError> {
        let ctx = p1.ctx().clone();
        if p2.ctx() != &ctx || q1.ctx() != &ctx || q2.ctx() != &ctx {
            return Err(ProgError::FieldMismatch);
        }
        let mut inputs: Vec<String> = Vec::new();
        let mut randoms: Vec<String> = Vec::new();
        for (i, r) in [
            (p1.inputs(), p1.randoms()),
            (p2.inputs(), p2.randoms()),
            (q1.inputs(), q1.randoms()),
            (q2.inputs(), q2.randoms()),
        ] {
            for n in i {
                if !inputs.contains(n) {
                    inputs.push(n.clone());
                }
            }
            for n in r {
                if !randoms.contains(n) {
                    randoms.push(n.clone());
                }
            }
        }
        if let Some(n) = inputs.iter().find(|n| randoms.contains(n)) {
            return Err(ProgError::Vars(format!("`{n}` is an input of one program and random in another")));
        }
        Ok(EquivQuery {
            p1: p1.with_vars(&inputs, &randoms)?,
            p2: p2.with_vars(&inputs, &randoms)?,
            q1: q1.with_vars(&inputs, &randoms)?,
            q2: q2.with_vars(&inputs, &randoms)?,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.p1.ctx()
    }

    pub fn inputs(&self) -> &[String] {
        self.p1.inputs()
    }

    pub fn randoms(&self) -> &[String] {
        self.p1.randoms()
    }

    pub fn is_arithmetic(&self) -> bool {
        self.p1.is_arithmetic() && self.q1.is_arithmetic()
    }
}

impl fmt::Display for EquivQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "P1: {}", self.p1)?;
        writeln!(f, "P2: {}", self.p2)?;
        writeln!(f, "Q1: {}", self.q1)?;
        write!(f, "Q2: {}", self.q2)
    }
}
