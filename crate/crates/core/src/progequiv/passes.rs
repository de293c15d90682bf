//! Rewriting a query into one over arithmetic programs.
//!
//! Failure is collected into one guard, the negated guard is put in CNF, and
//! each clause becomes a polynomial that vanishes exactly where the clause
//! holds; a disequality `Q != 0` is expressed through a fresh variable t
//! with `tQ - 1`, pinned by the constraints `t(tQ - 1)` and `Q(tQ - 1)` to
//! t = 0 when Q = 0 and t = 1/Q otherwise.  Conditionals become
//! `P2 + (tB)(P1 - P2)` with the same pinning of t.

use rustc_hash::{FxHashMap, FxHashSet};

use super::ast::{Cond, Expr};
use super::{ArithProgram, EquivLimits, EquivQuery, ProgError, Program};
use crate::mpoly::MPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub atom: MPoly,
    /// `atom = 0` when true, `!(atom = 0)` otherwise.
    pub positive: bool,
}

/// Disjunction of literals.
pub type Clause = Vec<Literal>;

/// Supplier of fresh random variables, one per distinct atom polynomial.
///
/// Polynomials handed to and returned from the supplier's internal users
/// live over the base variables followed by `capacity` reserved slots;
/// slot j becomes the j-th fresh variable in order of first use.
#[derive(Debug, Clone)]
pub struct FreshVars {
    base: Vec<String>,
    taken: FxHashSet<String>,
    capacity: usize,
    atoms: FxHashMap<MPoly, usize>,
    names: Vec<String>,
}

impl FreshVars {
    /// `base` are the existing variables, `avoid` further names not to use.
    pub fn new(base: &[String], avoid: &[String], capacity: usize) -> Self {
        FreshVars {
            base: base.to_vec(),
            taken: base.iter().chain(avoid).cloned().collect(),
            capacity,
            atoms: FxHashMap::default(),
            names: Vec::new(),
        }
    }

    /// A supplier sized for all atoms of `p`.
    pub fn for_program(p: &Program) -> Self {
        FreshVars::new(&p.names(), &[], distinct_atoms(p.body()))
    }

    pub fn used(&self) -> usize {
        self.names.len()
    }

    /// Names of the fresh variables created so far.
    pub fn fresh_names(&self) -> &[String] {
        &self.names
    }

    fn width(&self) -> usize {
        self.base.len() + self.capacity
    }

    fn widen(&self, p: &MPoly) -> MPoly {
        let map: Vec<usize> = (0..p.nvars()).collect();
        p.remap_vars(self.width(), &map)
    }

    fn narrow(&self, p: &MPoly) -> MPoly {
        let n = self.base.len() + self.used();
        let map: Vec<usize> = (0..p.nvars()).map(|i| if i < n { i } else { 0 }).collect();
        p.remap_vars(n, &map)
    }

    /// Variable index of the t that belongs to `atom` (a widened
    /// polynomial), creating it on first use.
    fn var_for(&mut self, atom: &MPoly) -> usize {
        if let Some(&i) = self.atoms.get(atom) {
            return i;
        }
        assert!(self.used() < self.capacity, "fresh variable supplier is full");
        let i = self.base.len() + self.used();
        let mut j = self.used() + 1;
        let name = loop {
            let cand = format!("t{j}");
            if !self.taken.contains(&cand) {
                break cand;
            }
            j += 1;
        };
        self.taken.insert(name.clone());
        self.names.push(name);
        self.atoms.insert(atom.clone(), i);
        i
    }
}

fn distinct_atoms(body: &[Expr]) -> usize {
    let mut conds = Vec::new();
    for e in body {
        e.conditions(&mut conds);
    }
    let mut atoms = Vec::new();
    for c in conds {
        c.atoms(&mut atoms);
    }
    atoms.into_iter().collect::<FxHashSet<_>>().len()
}

/// A fresh variable with its two pinning constraints.
#[derive(Debug, Clone)]
struct Gadget {
    t: usize,
    constraints: [MPoly; 2],
}

fn and_all(conds: &[Cond], template: &MPoly) -> Cond {
    let mut it = conds.iter().cloned();
    match it.next() {
        None => Cond::truth(template),
        Some(first) => it.fold(first, Cond::and),
    }
}

fn fail_paths(e: &Expr, path: &mut Vec<Cond>, template: &MPoly, out: &mut Vec<Cond>) {
    match e {
        Expr::Poly(_) => {}
        Expr::Fail => out.push(and_all(path, template)),
        Expr::If(c, t, f) => {
            path.push(c.clone());
            fail_paths(t, path, template, out);
            path.pop();
            path.push(Cond::not(c.clone()));
            fail_paths(f, path, template, out);
            path.pop();
        }
    }
}

/// `e` with failing branches cut off, `None` if every path fails.
fn strip_fail(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Poly(_) => Some(e.clone()),
        Expr::Fail => None,
        Expr::If(c, t, f) => match (strip_fail(t), strip_fail(f)) {
            (Some(t), Some(f)) => Some(Expr::if_(c.clone(), t, f)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        },
    }
}

/// The condition under which `p` fails and the body with its `fail`
/// branches removed; the two agree with `p` wherever the guard is false.
fn extract_failure(p: &Program) -> (Option<Cond>, Vec<Expr>) {
    let template = MPoly::zero(p.ctx(), p.nvars());
    let mut paths = Vec::new();
    for e in p.body() {
        fail_paths(e, &mut Vec::new(), &template, &mut paths);
    }
    let guard = paths.into_iter().reduce(Cond::or);
    let body = p
        .body()
        .iter()
        .map(|e| strip_fail(e).unwrap_or_else(|| Expr::Poly(template.clone())))
        .collect();
    (guard, body)
}

/// Equivalent program with at most one `fail`, as `if G then fail else E1;
/// E2; ...` where G collects the paths to every `fail`.
pub fn consolidate_failures(p: &Program) -> Program {
    if p.fail_count() <= 1 {
        return p.clone();
    }
    let (guard, mut body) = extract_failure(p);
    let guard = guard.expect("program has failures");
    body[0] = Expr::if_(guard, Expr::Fail, body[0].clone());
    p.with_body(body)
}

fn literal_size(c: &Cond, t: usize, e: usize) -> usize {
    match c {
        Cond::Or(a, b) => literal_size(a, t, literal_size(b, t, e)),
        Cond::And(a, b) => literal_size(a, literal_size(b, t, e), e),
        _ => (1 + t).saturating_add(e),
    }
}

fn literal_if(c: &Cond, t: Expr, e: Expr) -> Expr {
    match c {
        Cond::Or(a, b) => {
            let inner = literal_if(b, t.clone(), e);
            literal_if(a, t, inner)
        }
        Cond::And(a, b) => {
            let inner = literal_if(b, t, e.clone());
            literal_if(a, inner, e)
        }
        _ => Expr::if_(c.clone(), t, e),
    }
}

fn expr_literal_size(e: &Expr) -> usize {
    match e {
        Expr::If(c, t, f) => literal_size(&c.nnf(), expr_literal_size(t), expr_literal_size(f)),
        _ => 1,
    }
}

fn literalize_expr(e: &Expr) -> Expr {
    match e {
        Expr::If(c, t, f) => literal_if(&c.nnf(), literalize_expr(t), literalize_expr(f)),
        _ => e.clone(),
    }
}

fn literalize_body(body: &[Expr], max_size: usize) -> Result<Vec<Expr>, ProgError> {
    let size = body.iter().map(expr_literal_size).fold(0usize, usize::saturating_add);
    if size > max_size {
        return Err(ProgError::CapExceeded {
            what: "literalized program".into(),
            needed: format!("{size} nodes"),
            cap: max_size as u64,
        });
    }
    Ok(body.iter().map(literalize_expr).collect())
}

/// Rewrites every condition into a literal: `if a | b` nests through the
/// then-branch, `if a & b` through the else-branch.
pub fn literalize_conditions(p: &Program, limits: &EquivLimits) -> Result<Program, ProgError> {
    Ok(p.with_body(literalize_body(p.body(), limits.max_size)?))
}

/// CNF as a list of clauses, by distribution over the original atoms.
/// Constant atoms are folded: an empty list is true, an empty clause false.
pub fn cnf(c: &Cond, limits: &EquivLimits) -> Result<Vec<Clause>, ProgError> {
    cnf_nnf(&c.nnf(), limits.max_clauses)
}

fn constant_truth(q: &MPoly) -> Option<bool> {
    if q.is_zero() {
        Some(true)
    } else if q.is_constant() {
        Some(false)
    } else {
        None
    }
}

fn cnf_nnf(c: &Cond, cap: usize) -> Result<Vec<Clause>, ProgError> {
    let unit = |q: &MPoly, positive: bool| match constant_truth(q) {
        Some(v) if v == positive => Vec::new(),
        Some(_) => vec![Vec::new()],
        None => vec![vec![Literal {
            atom: q.clone(),
            positive,
        }]],
    };
    match c {
        Cond::Atom(q) => Ok(unit(q, true)),
        Cond::Not(inner) => match &**inner {
            Cond::Atom(q) => Ok(unit(q, false)),
            _ => unreachable!("negation normal form"),
        },
        Cond::And(a, b) => {
            let mut out = cnf_nnf(a, cap)?;
            for cl in cnf_nnf(b, cap)? {
                if !out.contains(&cl) {
                    out.push(cl);
                }
            }
            check_clauses(out.len(), cap)?;
            Ok(out)
        }
        Cond::Or(a, b) => {
            let (ca, cb) = (cnf_nnf(a, cap)?, cnf_nnf(b, cap)?);
            check_clauses(ca.len().saturating_mul(cb.len()), cap)?;
            let mut out: Vec<Clause> = Vec::new();
            for x in &ca {
                for y in &cb {
                    let mut cl = x.clone();
                    for l in y {
                        if !cl.contains(l) {
                            cl.push(l.clone());
                        }
                    }
                    let tautology = cl
                        .iter()
                        .any(|l| cl.iter().any(|m| m.atom == l.atom && m.positive != l.positive));
                    if !tautology && !out.contains(&cl) {
                        out.push(cl);
                    }
                }
            }
            Ok(out)
        }
    }
}

fn check_clauses(n: usize, cap: usize) -> Result<(), ProgError> {
    if n > cap {
        return Err(ProgError::CapExceeded {
            what: "CNF".into(),
            needed: format!("{n} clauses"),
            cap: cap as u64,
        });
    }
    Ok(())
}

/// Widened clause polynomial and its gadgets.
fn clause_gadget(clause: &[Literal], fresh: &mut FreshVars) -> (MPoly, Vec<Gadget>) {
    let ctx = clause.first().map(|l| l.atom.ctx().clone());
    let Some(ctx) = ctx else {
        panic!("empty clause has no polynomial form");
    };
    let mut b = MPoly::one(&ctx, fresh.width());
    let mut gadgets = Vec::new();
    for l in clause {
        let q = fresh.widen(&l.atom);
        if l.positive {
            b = &b * &q;
        } else {
            let t = fresh.var_for(&q);
            let tv = MPoly::var(&ctx, fresh.width(), t);
            let tq1 = &(&tv * &q) - &MPoly::one(&ctx, fresh.width());
            b = &b * &tq1;
            gadgets.push(Gadget {
                t,
                constraints: [&tv * &tq1, &q * &tq1],
            });
        }
    }
    (b, gadgets)
}

/// The polynomial B vanishing exactly where `clause` holds (given the side
/// constraints), and the side constraints `t(tQ - 1)`, `Q(tQ - 1)` for each
/// negative literal.  Results are over the supplier's base variables
/// followed by the fresh variables used so far.
pub fn clause_to_polynomial(clause: &[Literal], fresh: &mut FreshVars) -> (MPoly, Vec<MPoly>) {
    let (b, gadgets) = clause_gadget(clause, fresh);
    let sides = gadgets
        .iter()
        .flat_map(|g| g.constraints.iter().map(|c| fresh.narrow(c)))
        .collect();
    (fresh.narrow(&b), sides)
}

fn eliminate_expr(e: &Expr, fresh: &mut FreshVars, gadgets: &mut Vec<Gadget>) -> MPoly {
    match e {
        Expr::Poly(p) => fresh.widen(p),
        Expr::Fail => panic!("`fail` must be removed before eliminating conditionals"),
        Expr::If(c, t, f) => {
            let a = eliminate_expr(t, fresh, gadgets);
            let b = eliminate_expr(f, fresh, gadgets);
            let (atom, positive) = match c {
                Cond::Atom(q) => (q, true),
                Cond::Not(inner) => match &**inner {
                    Cond::Atom(q) => (q, false),
                    _ => panic!("condition is not a literal"),
                },
                _ => panic!("condition is not a literal"),
            };
            let q = fresh.widen(atom);
            let t = fresh.var_for(&q);
            let ctx = q.ctx().clone();
            let tv = MPoly::var(&ctx, fresh.width(), t);
            let s = &tv * &q;
            let qt1 = &s - &MPoly::one(&ctx, fresh.width());
            gadgets.push(Gadget {
                t,
                constraints: [&q * &qt1, &tv * &qt1],
            });
            if positive {
                &a + &(&s * &(&b - &a))
            } else {
                &b + &(&s * &(&a - &b))
            }
        }
    }
}

/// Replaces each `if` with literal condition by polynomial selection; the
/// result is an arithmetic program over the program's variables plus the
/// fresh variables of `fresh`, with the side constraints it needs.
/// Panics if `p` still contains `fail` or non-literal conditions.
pub fn eliminate_conditionals(p: &Program, fresh: &mut FreshVars) -> (ArithProgram, Vec<MPoly>) {
    let mut gadgets = Vec::new();
    let body: Vec<MPoly> = p.body().iter().map(|e| eliminate_expr(e, fresh, &mut gadgets)).collect();
    let mut seen = FxHashSet::default();
    let mut cons = Vec::new();
    for g in gadgets {
        if seen.insert(g.t) {
            cons.extend(g.constraints.iter().map(|c| fresh.narrow(c)));
        }
    }
    let mut randoms = p.randoms().to_vec();
    randoms.extend(fresh.fresh_names().iter().cloned());
    let body = body.iter().map(|b| fresh.narrow(b)).collect();
    let prog = ArithProgram::new(p.ctx(), p.inputs().to_vec(), randoms, body).expect("valid variables");
    (prog, cons)
}

/// Constraint list of one side, adding each t's pinning constraints once.
struct SideConstraints {
    polys: Vec<MPoly>,
    pinned: FxHashSet<usize>,
}

impl SideConstraints {
    fn add_gadgets(&mut self, gadgets: &[Gadget]) {
        for g in gadgets {
            if self.pinned.insert(g.t) {
                self.polys.extend(g.constraints.iter().cloned());
            }
        }
    }
}

/// An equivalent query whose four programs are arithmetic.  The guard
/// polynomials of P1 and Q1 go to both constraint programs, the pinning
/// constraints of conditionals to their own side only.
pub fn reduce_query(q: &EquivQuery, limits: &EquivLimits) -> Result<EquivQuery, ProgError> {
    if q.is_arithmetic() {
        return Ok(q.clone());
    }
    let names: Vec<String> = q.inputs().iter().chain(q.randoms()).cloned().collect();
    let capacity = distinct_atoms(q.p1.body()) + distinct_atoms(q.q1.body());
    let mut fresh = FreshVars::new(&names, &[], capacity);
    let mut sides: Vec<SideConstraints> = [&q.p2, &q.q2]
        .iter()
        .map(|c| SideConstraints {
            polys: c.body().iter().map(|p| fresh.widen(p)).collect(),
            pinned: FxHashSet::default(),
        })
        .collect();
    let mut bodies = Vec::new();
    for (own, prog) in [(0usize, &q.p1), (1, &q.q1)] {
        let (guard, stripped) = extract_failure(prog);
        if let Some(g) = guard {
            for clause in cnf(&Cond::not(g), limits)? {
                if clause.is_empty() {
                    let one = MPoly::one(q.ctx(), fresh.width());
                    for s in sides.iter_mut() {
                        s.polys.push(one.clone());
                    }
                    continue;
                }
                let (b, gadgets) = clause_gadget(&clause, &mut fresh);
                for s in sides.iter_mut() {
                    s.polys.push(b.clone());
                    s.add_gadgets(&gadgets);
                }
            }
        }
        let lit = literalize_body(&stripped, limits.max_size)?;
        let mut gadgets = Vec::new();
        let body: Vec<MPoly> = lit.iter().map(|e| eliminate_expr(e, &mut fresh, &mut gadgets)).collect();
        sides[own].add_gadgets(&gadgets);
        bodies.push(body);
    }
    let total: usize = sides.iter().map(|s| s.polys.len()).sum();
    if total > limits.max_size {
        return Err(ProgError::CapExceeded {
            what: "constraint programs".into(),
            needed: format!("{total} polynomials"),
            cap: limits.max_size as u64,
        });
    }
    let inputs = q.inputs().to_vec();
    let mut randoms = q.randoms().to_vec();
    randoms.extend(fresh.fresh_names().iter().cloned());
    let arith = |polys: &[MPoly]| {
        ArithProgram::new(
            q.ctx(),
            inputs.clone(),
            randoms.clone(),
            polys.iter().map(|p| fresh.narrow(p)).collect(),
        )
    };
    let p1 = arith(&bodies[0])?.to_program();
    let q1 = arith(&bodies[1])?.to_program();
    let p2 = arith(&sides[0].polys)?;
    let q2 = arith(&sides[1].polys)?;
    Ok(EquivQuery { p1, p2, q1, q2 })
}
