//! Output distributions by exhaustive enumeration.
//!
//! Random variables are assigned one at a time, and a constraint is tested
//! as soon as all its variables are assigned, so that variables pinned by
//! constraints (such as the t of a `t(tB - 1), B(tB - 1)` pair) cost one
//! scan of the field rather than a factor in the search size.  Variables
//! that occur nowhere on a side are skipped: they scale every outcome
//! count by the same factor.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::{ArithProgram, EquivLimits, EquivQuery, Expr, ProgError, Program};
use crate::ff::{Embedding, FieldCtx, FieldElement};
use crate::mpoly::MPoly;

/// Output distribution for one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    /// No assignment survives the constraints and failures.
    Vacuous,
    Dist(BTreeMap<Vec<FieldElement>, BigRational>),
}

impl Distribution {
    pub fn prob(&self, out: &[FieldElement]) -> Option<BigRational> {
        match self {
            Distribution::Vacuous => None,
            Distribution::Dist(m) => Some(m.get(out).cloned().unwrap_or_else(|| BigRational::from_integer(0.into()))),
        }
    }
}

/// Where two distributions at one input differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: u32,
    pub input: Vec<FieldElement>,
    /// First output tuple whose probabilities differ.
    pub output: Vec<FieldElement>,
    /// Probability under P1 | P2, `None` when that side is vacuous.
    pub p_left: Option<BigRational>,
    pub p_right: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    EquivalentUpTo { k_max: u32 },
    Inequivalent(Witness),
    CapsExceeded { k: u32, reason: String },
}

/// Outcome counts of one side: output codes to number of assignments.
struct Tally {
    counts: BTreeMap<Vec<u32>, u64>,
    total: u64,
}

struct Side<'a> {
    body: &'a [Expr],
    constraints: &'a [MPoly],
    /// Programs whose failure also removes an assignment.
    guards: Vec<&'a [Expr]>,
}

fn vars_of(p: &MPoly, used: &mut [bool]) {
    for (m, _) in p.terms() {
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                used[i] = true;
            }
        }
    }
}

struct Search<'a> {
    side: &'a Side<'a>,
    /// Field size.
    q: u32,
    order: Vec<usize>,
    /// Constraints to test once `order[..=level]` is assigned, by level.
    checks: Vec<Vec<&'a MPoly>>,
    point: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
    tally: Tally,
}

impl Search<'_> {
    fn leaf(&mut self) {
        let point = &self.point;
        if self.side.guards.iter().any(|g| g.iter().any(|e| e.fails_at(point))) {
            return;
        }
        let mut out = Vec::with_capacity(self.side.body.len());
        for e in self.side.body {
            match e.eval(point) {
                Some(v) => out.push(v),
                None => return,
            }
        }
        *self.tally.counts.entry(out).or_insert(0) += 1;
        self.tally.total += 1;
    }

    fn run(&mut self, level: usize) -> Result<(), ProgError> {
        if level == self.order.len() {
            self.leaf();
            return Ok(());
        }
        let var = self.order[level];
        for v in 0..self.q {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(ProgError::CapExceeded {
                    what: "distribution search".into(),
                    needed: format!("more than {} nodes", self.max_nodes),
                    cap: self.max_nodes,
                });
            }
            self.point[var] = v;
            if self.checks[level + 1].iter().all(|c| c.eval_codes(&self.point) == 0) {
                self.run(level + 1)?;
            }
        }
        self.point[var] = 0;
        Ok(())
    }
}

/// Counts outcomes of `side` at `input` (codes of the first variables).
fn tally(side: &Side<'_>, ctx: &FieldCtx, ninputs: usize, nvars: usize, input: &[u32], max_nodes: u64) -> Result<Tally, ProgError> {
    let mut used = vec![false; nvars];
    let mut polys = Vec::new();
    for e in side.body.iter().chain(side.guards.iter().flat_map(|g| g.iter())) {
        e.polys(&mut polys);
    }
    polys.extend(side.constraints.iter());
    for p in &polys {
        vars_of(p, &mut used);
    }
    let order: Vec<usize> = (ninputs..nvars).filter(|&i| used[i]).collect();
    let mut checks: Vec<Vec<&MPoly>> = vec![Vec::new(); order.len() + 1];
    for c in side.constraints {
        let mut u = vec![false; nvars];
        vars_of(c, &mut u);
        let level = order.iter().rposition(|&v| u[v]).map_or(0, |l| l + 1);
        checks[level].push(c);
    }
    let mut point = vec![0u32; nvars];
    point[..ninputs].copy_from_slice(input);
    let mut s = Search {
        side,
        q: ctx.size() as u32,
        order,
        checks,
        point,
        nodes: 0,
        max_nodes,
        tally: Tally {
            counts: BTreeMap::new(),
            total: 0,
        },
    };
    if s.checks[0].iter().all(|c| c.eval_codes(&s.point) == 0) {
        s.run(0)?;
    }
    Ok(s.tally)
}

fn to_distribution(ctx: &FieldCtx, t: &Tally) -> Distribution {
    if t.total == 0 {
        return Distribution::Vacuous;
    }
    let total = BigInt::from(t.total);
    Distribution::Dist(
        t.counts
            .iter()
            .map(|(out, &c)| (codes_to_elems(ctx, out), BigRational::new(BigInt::from(c), total.clone())))
            .collect(),
    )
}

fn codes_to_elems(ctx: &FieldCtx, codes: &[u32]) -> Vec<FieldElement> {
    codes.iter().map(|&c| ctx.element(c as u64).expect("code in range")).collect()
}

fn extension(base: &FieldCtx, k: u32, limits: &EquivLimits) -> Result<(FieldCtx, Embedding), ProgError> {
    let ext = FieldCtx::with_cap(base.p() as u64, base.k() * k, limits.max_field)?;
    let emb = Embedding::new(base, &ext)?;
    Ok((ext, emb))
}

fn input_codes(ext: &FieldCtx, input: &[FieldElement], n: usize) -> Result<Vec<u32>, ProgError> {
    if input.len() != n {
        return Err(ProgError::Vars(format!("{} input values for {n} inputs", input.len())));
    }
    for e in input {
        ext.check(e)?;
    }
    Ok(input.iter().map(FieldElement::code).collect())
}

/// Output distribution of `body` at `input` over F_{q^k}, conditioned on
/// `constraints` vanishing and `body` not failing.
pub fn distribution(
    body: &Program,
    constraints: &ArithProgram,
    input: &[FieldElement],
    k: u32,
    limits: &EquivLimits,
) -> Result<Distribution, ProgError> {
    let mut inputs = body.inputs().to_vec();
    let mut randoms = body.randoms().to_vec();
    for n in constraints.inputs() {
        if !inputs.contains(n) {
            inputs.push(n.clone());
        }
    }
    for n in constraints.randoms() {
        if !randoms.contains(n) {
            randoms.push(n.clone());
        }
    }
    if inputs.len() != body.inputs().len() {
        return Err(ProgError::Vars("constraints read inputs the program does not declare".into()));
    }
    let body = body.with_vars(&inputs, &randoms)?;
    let cons = constraints.with_vars(&inputs, &randoms)?;
    let (ext, emb) = extension(body.ctx(), k, limits)?;
    let body = body.embed_into(&emb)?;
    let cons = cons.to_program().embed_into(&emb)?.to_arith().expect("polynomials only");
    let codes = input_codes(&ext, input, inputs.len())?;
    let side = Side {
        body: body.body(),
        constraints: cons.body(),
        guards: Vec::new(),
    };
    let t = tally(&side, &ext, inputs.len(), body.nvars(), &codes, limits.max_nodes)?;
    Ok(to_distribution(&ext, &t))
}

fn compare(ext: &FieldCtx, k: u32, input: &[u32], a: &Tally, b: &Tally) -> Option<Witness> {
    let elems = |c: &[u32]| codes_to_elems(ext, c);
    let prob = |t: &Tally, out: &[u32]| {
        BigRational::new(
            BigInt::from(t.counts.get(out).copied().unwrap_or(0)),
            BigInt::from(t.total),
        )
    };
    match (a.total, b.total) {
        (0, 0) => None,
        (0, _) | (_, 0) => {
            let live = if a.total == 0 { b } else { a };
            let out = live.counts.keys().next().expect("live side has an outcome");
            let p = Some(prob(live, out));
            let (p_left, p_right) = if a.total == 0 { (None, p) } else { (p, None) };
            Some(Witness {
                k,
                input: elems(input),
                output: elems(out),
                p_left,
                p_right,
            })
        }
        _ => {
            let mut keys: Vec<&Vec<u32>> = a.counts.keys().chain(b.counts.keys()).collect();
            keys.sort();
            keys.dedup();
            for out in keys {
                let ca = a.counts.get(out).copied().unwrap_or(0) as u128;
                let cb = b.counts.get(out).copied().unwrap_or(0) as u128;
                if ca * b.total as u128 != cb * a.total as u128 {
                    return Some(Witness {
                        k,
                        input: elems(input),
                        output: elems(out),
                        p_left: Some(prob(a, out)),
                        p_right: Some(prob(b, out)),
                    });
                }
            }
            None
        }
    }
}

/// First input (in enumeration order) at which the two sides of `query`
/// have different distributions over F_{q^k}.
pub fn find_counterexample(query: &EquivQuery, k: u32, limits: &EquivLimits) -> Result<Option<Witness>, ProgError> {
    let (ext, emb) = extension(query.ctx(), k, limits)?;
    let p1 = query.p1.embed_into(&emb)?;
    let q1 = query.q1.embed_into(&emb)?;
    let p2 = query.p2.to_program().embed_into(&emb)?.to_arith().expect("polynomials only");
    let q2 = query.q2.to_program().embed_into(&emb)?.to_arith().expect("polynomials only");
    fn guard(p: &Program) -> Option<&[Expr]> {
        (p.fail_count() > 0).then(|| p.body())
    }
    let left = Side {
        body: p1.body(),
        constraints: p2.body(),
        guards: guard(&q1).into_iter().collect(),
    };
    let right = Side {
        body: q1.body(),
        constraints: q2.body(),
        guards: guard(&p1).into_iter().collect(),
    };
    let ninputs = query.inputs().len();
    let nvars = p1.nvars();
    let qk = ext.size();
    let n_inputs = (qk as u128).checked_pow(ninputs as u32).unwrap_or(u128::MAX);
    if n_inputs > limits.max_inputs as u128 {
        return Err(ProgError::CapExceeded {
            what: format!("inputs over F_{qk}"),
            needed: n_inputs.to_string(),
            cap: limits.max_inputs,
        });
    }
    let decode = |mut idx: u64| {
        let mut c = vec![0u32; ninputs];
        for slot in c.iter_mut().rev() {
            *slot = (idx % qk) as u32;
            idx /= qk;
        }
        c
    };
    let found = (0..n_inputs as u64)
        .into_par_iter()
        .map(|idx| -> Result<Option<Witness>, ProgError> {
            let input = decode(idx);
            let a = tally(&left, &ext, ninputs, nvars, &input, limits.max_nodes)?;
            let b = tally(&right, &ext, ninputs, nvars, &input, limits.max_nodes)?;
            Ok(compare(&ext, k, &input, &a, &b))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(None),
        Some(r) => r,
    }
}

/// Whether the two sides of `query` agree at every input over F_{q^k}.
pub fn equivalent_at(query: &EquivQuery, k: u32, limits: &EquivLimits) -> Result<bool, ProgError> {
    Ok(find_counterexample(query, k, limits)?.is_none())
}

/// Checks k = 1..=k_max in order.  An affirmative verdict covers only the
/// fields checked.
pub fn universal_equivalence(query: &EquivQuery, k_max: u32, limits: &EquivLimits) -> Verdict {
    for k in 1..=k_max {
        match find_counterexample(query, k, limits) {
            Ok(None) => {}
            Ok(Some(w)) => return Verdict::Inequivalent(w),
            Err(e) => {
                return Verdict::CapsExceeded {
                    k,
                    reason: e.to_string(),
                }
            }
        }
    }
    Verdict::EquivalentUpTo { k_max }
}
