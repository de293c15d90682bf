#![allow(dead_code)]

use std::collections::BTreeSet;

use kronzeta::count::PolySystem;
use kronzeta::ff::{FieldCtx, FieldElement};
use kronzeta::mpoly::{monomials_of_degree, MPoly};
use kronzeta::progequiv::{ArithProgram, Cond, EquivQuery, Expr, Program};
use rand::seq::SliceRandom;
use rand::Rng;

/// Common zeros over `ext` by evaluating every polynomial at every point
/// with `MPoly::eval`.
pub fn zero_set(f: &PolySystem, ext: &FieldCtx) -> BTreeSet<Vec<u32>> {
    let g = f.embed_into(ext).unwrap();
    let elems: Vec<FieldElement> = ext.elements().collect();
    let n = g.nvars();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; n];
    loop {
        let pt: Vec<FieldElement> = idx.iter().map(|&i| elems[i]).collect();
        if g.polys().iter().all(|p| p.eval(&pt).unwrap().is_zero()) {
            out.insert(pt.iter().map(|e| e.code()).collect());
        }
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < elems.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

pub fn random_poly(ctx: &FieldCtx, n: usize, d: u32, rng: &mut impl Rng) -> MPoly {
    let q = ctx.size();
    let terms = (0..=d)
        .flat_map(|e| monomials_of_degree(n, e))
        .map(|m| (m.exps().to_vec(), ctx.from_u64(rng.gen_range(0..q))))
        .collect::<Vec<_>>();
    MPoly::from_terms(ctx, n, terms).unwrap()
}

/// m random combinations of n polynomials of degree d through a common
/// point, so the system is redundant and usually has several zeros.
pub fn redundant_system(ctx: &FieldCtx, n: usize, d: u32, m: usize, rng: &mut impl Rng) -> PolySystem {
    let q = ctx.size();
    let pt: Vec<FieldElement> = (0..n).map(|_| ctx.from_u64(rng.gen_range(0..q))).collect();
    let base: Vec<MPoly> = (0..n)
        .map(|_| loop {
            let f = random_poly(ctx, n, d, rng);
            if f.degree() == Some(d) {
                let c = MPoly::constant(ctx, n, f.eval(&pt).unwrap());
                break &f - &c;
            }
        })
        .collect();
    let polys = (0..m)
        .map(|_| loop {
            let mut acc = MPoly::zero(ctx, n);
            for b in &base {
                acc = &acc + &b.scale(&ctx.from_u64(rng.gen_range(0..q)));
            }
            if acc.degree() == Some(d) {
                break acc;
            }
        })
        .collect();
    PolySystem::new(ctx, n, polys).unwrap()
}

pub fn random_system(rng: &mut impl Rng, primes: &[u64], max_m: usize, max_n: usize, max_d: u32) -> PolySystem {
    let p = *primes.choose(rng).unwrap();
    let ctx = FieldCtx::prime(p).unwrap();
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let polys = (0..m)
        .map(|_| {
            let d = rng.gen_range(0..=max_d);
            sparse_poly(&ctx, n, d, 3, rng)
        })
        .collect();
    PolySystem::new(&ctx, n, polys).unwrap()
}

/// At most `terms` random terms of degree at most `d`.
pub fn sparse_poly(ctx: &FieldCtx, n: usize, d: u32, terms: usize, rng: &mut impl Rng) -> MPoly {
    let q = ctx.size();
    let monos: Vec<_> = (0..=d).flat_map(|e| monomials_of_degree(n, e)).collect();
    let k = rng.gen_range(1..=terms);
    let t = (0..k)
        .map(|_| (monos.choose(rng).unwrap().exps().to_vec(), ctx.from_u64(rng.gen_range(0..q))))
        .collect::<Vec<_>>();
    MPoly::from_terms(ctx, n, t).unwrap()
}

/// Random pieces of small programs.
pub struct ProgramGen<'a> {
    pub ctx: &'a FieldCtx,
    pub nvars: usize,
    /// Variables a polynomial may use.
    pub vars: Vec<usize>,
}

impl ProgramGen<'_> {
    pub fn poly(&self, rng: &mut impl Rng) -> MPoly {
        let q = self.ctx.size();
        let k = rng.gen_range(1..=2);
        let mut p = MPoly::zero(self.ctx, self.nvars);
        for _ in 0..k {
            let mut e = vec![0u32; self.nvars];
            for _ in 0..rng.gen_range(0..=2) {
                e[*self.vars.choose(rng).unwrap()] += 1;
            }
            let c = self.ctx.from_u64(rng.gen_range(1..q));
            p = &p + &MPoly::from_terms(self.ctx, self.nvars, [(e, c)]).unwrap();
        }
        p
    }

    pub fn cond(&self, depth: u32, rng: &mut impl Rng) -> Cond {
        if depth == 0 || rng.gen_bool(0.5) {
            let a = Cond::Atom(self.poly(rng));
            return if rng.gen_bool(0.4) { Cond::not(a) } else { a };
        }
        match rng.gen_range(0..3) {
            0 => Cond::not(self.cond(depth - 1, rng)),
            1 => Cond::and(self.cond(depth - 1, rng), self.cond(depth - 1, rng)),
            _ => Cond::or(self.cond(depth - 1, rng), self.cond(depth - 1, rng)),
        }
    }

    pub fn expr(&self, budget: &mut u32, rng: &mut impl Rng) -> Expr {
        if *budget > 0 && rng.gen_bool(0.6) {
            *budget -= 1;
            let c = self.cond(2, rng);
            let t = self.expr(budget, rng);
            let e = self.expr(budget, rng);
            return Expr::if_(c, t, e);
        }
        if rng.gen_bool(0.15) {
            Expr::Fail
        } else {
            Expr::Poly(self.poly(rng))
        }
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// A random query `P1 | P2 ≈ Q1 | Q2` over one input x and randoms y, z:
/// Q1 is an independent program, a copy of P1 with y and z exchanged, or a
/// copy with one polynomial altered.
pub fn random_query<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> EquivQuery {
    let inputs = names(&["x"]);
    let randoms = names(&["y", "z"]);
    let gen = ProgramGen {
        ctx,
        nvars: 3,
        vars: vec![0, 1, 2],
    };
    let len = rng.gen_range(1..=2);
    let mut budget = 2;
    let body: Vec<Expr> = (0..len).map(|_| gen.expr(&mut budget, rng)).collect();
    let p1 = Program::new(ctx, inputs.clone(), randoms.clone(), body.clone()).unwrap();
    let q1_body: Vec<Expr> = match rng.gen_range(0..3) {
        0 => {
            let mut budget = 2;
            (0..len).map(|_| gen.expr(&mut budget, rng)).collect()
        }
        1 => body.iter().map(|e| e.map_polys(&mut |p| p.remap_vars(3, &[0, 2, 1]))).collect(),
        _ => {
            let mut done = false;
            body.iter()
                .map(|e| {
                    e.map_polys(&mut |p| {
                        if !done && rng.gen_bool(0.5) {
                            done = true;
                            p + &MPoly::one(ctx, 3)
                        } else {
                            p.clone()
                        }
                    })
                })
                .collect()
        }
    };
    let q1 = Program::new(ctx, inputs.clone(), randoms.clone(), q1_body).unwrap();
    let constraint = |rng: &mut R| {
        let body = if rng.gen_bool(0.3) { vec![gen.poly(rng)] } else { Vec::new() };
        ArithProgram::new(ctx, inputs.clone(), randoms.clone(), body).unwrap()
    };
    let p2 = constraint(rng);
    let q2 = constraint(rng);
    EquivQuery::new(p1, p2, q1, q2).unwrap()
}
