//! Sparse multivariate polynomials over a finite field.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector under graded
//! lexicographic order.  By convention a homogenized polynomial carries its
//! homogenizing variable at index 0.

pub mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use crate::ff::{Embedding, FieldCtx, FieldElement, FieldError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("expected {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("polynomial of degree {degree} exceeds the target degree {target}")]
    DegreeTooLarge { degree: u32, target: u32 },
    #[error("cannot homogenize the zero polynomial")]
    ZeroPolynomial,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Exponent vector. Ordered by total degree, then lexicographically, so
/// that x1 > x2 > ... within a degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Monomials of total degree exactly `degree` in `n` variables, in
/// descending graded-lex order (x1^D first).
pub fn monomials_of_degree(n: usize, degree: u32) -> Vec<Monomial> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == n {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(n, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(n, 0, degree, &mut vec![0; n], &mut out);
    out
}

/// Names x1..xn, the external convention for system files.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Names x0..x{n-1}, for polynomials carrying a homogenizing variable.
pub fn homogeneous_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    ctx: FieldCtx,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl std::hash::Hash for MPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.p().hash(state);
        self.ctx.k().hash(state);
        self.nvars.hash(state);
        self.terms.hash(state);
    }
}

/// Operand for [`MPoly::apply`].
#[derive(Debug, Clone, Copy)]
pub enum PolyOp<'a> {
    Add(&'a MPoly),
    Sub(&'a MPoly),
    Mul(&'a MPoly),
}

impl MPoly {
    pub fn zero(ctx: &FieldCtx, nvars: usize) -> Self {
        MPoly {
            ctx: ctx.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &FieldCtx, nvars: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(ctx, nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(ctx: &FieldCtx, nvars: usize) -> Self {
        Self::constant(ctx, nvars, ctx.one())
    }

    pub fn var(ctx: &FieldCtx, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Self::zero(ctx, nvars);
        p.add_term(Monomial::var(nvars, i), ctx.one());
        p
    }

    /// Builds a polynomial from (exponents, coefficient) pairs; repeated
    /// monomials are summed.
    pub fn from_terms<I>(ctx: &FieldCtx, nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut p = Self::zero(ctx, nvars);
        for (e, c) in terms {
            ctx.check(&c)?;
            if e.len() != nvars {
                return Err(PolyError::Arity {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).copied().unwrap_or_else(|| self.ctx.zero())
    }

    /// Total degree; `None` for the zero polynomial, which sits below every
    /// integer degree.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn degree_or_zero(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().map_or(true, |d| d == 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.ctx.add(o.get(), &c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn compatible(&self, other: &MPoly) -> Result<(), PolyError> {
        if self.ctx != other.ctx {
            return Err(PolyError::Field(FieldError::Mismatch {
                expected: (self.ctx.p(), self.ctx.k()),
                found: (other.ctx.p(), other.ctx.k()),
            }));
        }
        if self.nvars != other.nvars {
            return Err(PolyError::Arity {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    /// Checked ring arithmetic.
    pub fn apply(&self, op: PolyOp<'_>) -> Result<MPoly, PolyError> {
        let other = match op {
            PolyOp::Add(g) | PolyOp::Sub(g) | PolyOp::Mul(g) => g,
        };
        self.compatible(other)?;
        Ok(match op {
            PolyOp::Add(g) => self.add_unchecked(g, false),
            PolyOp::Sub(g) => self.add_unchecked(g, true),
            PolyOp::Mul(g) => self.mul_unchecked(g),
        })
    }

    fn add_unchecked(&self, g: &MPoly, negate: bool) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &g.terms {
            let c = if negate { self.ctx.neg(c) } else { *c };
            out.add_term(m.clone(), c);
        }
        out
    }

    fn mul_unchecked(&self, g: &MPoly) -> MPoly {
        if self.is_zero() || g.is_zero() {
            return MPoly::zero(&self.ctx, self.nvars);
        }
        let d = self.ctx.data();
        let mut acc: FxHashMap<Monomial, u32> = FxHashMap::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &g.terms {
                let prod = d.mul(ca.code(), cb.code());
                let e = acc.entry(ma.mul(mb)).or_insert(0);
                *e = d.add(*e, prod);
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m, self.ctx.element(c as u64).unwrap()))
            .collect();
        MPoly {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn scale(&self, c: &FieldElement) -> MPoly {
        let mut out = MPoly::zero(&self.ctx, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), self.ctx.mul(a, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one(&self.ctx, self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::Arity {
                expected: self.nvars,
                found: point.len(),
            });
        }
        for x in point {
            self.ctx.check(x)?;
        }
        let codes: Vec<u32> = point.iter().map(|x| x.code()).collect();
        Ok(self.ctx.wrap(self.eval_codes(&codes)))
    }

    /// Evaluation on raw element codes of this polynomial's field.
    pub(crate) fn eval_codes(&self, point: &[u32]) -> u32 {
        let d = self.ctx.data();
        let mut acc = 0u32;
        for (m, c) in &self.terms {
            let mut t = c.code();
            for (&x, &e) in point.iter().zip(&m.0) {
                if e != 0 {
                    t = d.mul(t, d.pow(x, e as u64));
                    if t == 0 {
                        break;
                    }
                }
            }
            acc = d.add(acc, t);
        }
        acc
    }

    /// Multiplies each term of degree e by x0^{d-e}, with x0 prepended as
    /// variable 0.
    pub fn homogenize(&self, d: u32) -> Result<MPoly, PolyError> {
        let deg = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        if deg > d {
            return Err(PolyError::DegreeTooLarge {
                degree: deg,
                target: d,
            });
        }
        let mut out = MPoly::zero(&self.ctx, self.nvars + 1);
        for (m, c) in &self.terms {
            let mut e = Vec::with_capacity(self.nvars + 1);
            e.push(d - m.degree());
            e.extend_from_slice(&m.0);
            out.terms.insert(Monomial(e), *c);
        }
        Ok(out)
    }

    /// Sets x0 := 1 and drops it.
    pub fn dehomogenize(&self) -> MPoly {
        assert!(self.nvars >= 1, "dehomogenizing a polynomial with no variables");
        let mut out = MPoly::zero(&self.ctx, self.nvars - 1);
        for (m, c) in &self.terms {
            out.add_term(Monomial(m.0[1..].to_vec()), *c);
        }
        out
    }

    /// Reads the coefficients in a larger field.
    pub fn embed_into(&self, emb: &Embedding) -> Result<MPoly, PolyError> {
        emb.source().check(&self.ctx.zero())?;
        let mut out = MPoly::zero(emb.target(), self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), emb.apply(c)?);
        }
        Ok(out)
    }

    /// Same polynomial in `n` variables, old variable i becoming `map[i]`.
    pub fn remap_vars(&self, n: usize, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = MPoly::zero(&self.ctx, n);
        for (m, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), *c);
        }
        out
    }

    /// Rendering with the given variable names, highest terms first.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        names[v].clone()
                    } else {
                        format!("{}^{}", names[v], e)
                    }
                })
                .collect();
            if vars.is_empty() {
                out.push_str(&c.to_string());
            } else {
                if !c.is_one() {
                    out.push_str(&c.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.nvars)))
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl $tr<&MPoly> for &MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &MPoly) -> MPoly {
                self.apply(PolyOp::$op(rhs)).expect("incompatible polynomials")
            }
        }
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&self.ctx.from_i64(-1))
    }
}

/// Σ coeffs[i] · polys[i].
pub fn linear_combination(polys: &[MPoly], coeffs: &[FieldElement]) -> Result<MPoly, PolyError> {
    if polys.len() != coeffs.len() {
        return Err(PolyError::Shape(format!(
            "{} polynomials but {} coefficients",
            polys.len(),
            coeffs.len()
        )));
    }
    let first = polys
        .first()
        .ok_or_else(|| PolyError::Shape("empty linear combination".into()))?;
    let mut out = MPoly::zero(&first.ctx, first.nvars);
    for (f, c) in polys.iter().zip(coeffs) {
        first.compatible(f)?;
        first.ctx.check(c)?;
        out = out.add_unchecked(&f.scale(c), false);
    }
    Ok(out)
}

/// The list whose u-th entry is Σ_v B[u][v] · polys[v].
pub fn apply_matrix(polys: &[MPoly], b: &Matrix) -> Result<Vec<MPoly>, PolyError> {
    if b.nrows() != polys.len() || b.ncols() != polys.len() {
        return Err(PolyError::Shape(format!(
            "{}x{} matrix applied to {} polynomials",
            b.nrows(),
            b.ncols(),
            polys.len()
        )));
    }
    (0..b.nrows())
        .map(|u| linear_combination(polys, b.row(u)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse::parse_poly;

    fn poly(ctx: &FieldCtx, names: &[&str], s: &str) -> MPoly {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        parse_poly(ctx, &names, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let x = |s| poly(&f5, &["x", "y"], s);
        assert_eq!(x("x+1") * x("x-1"), x("x^2 + 4"));
        assert_eq!(&x("x^2+y") + &MPoly::zero(&f5, 2), x("x^2+y"));
        assert!(x("x^2+y").scale(&f5.zero()).is_zero());
        assert_eq!(x("(x+y)^2").degree(), Some(2));
        assert_eq!(MPoly::zero(&f5, 2).degree(), None);
        assert!(None < Some(0u32));
    }

    #[test]
    fn mismatches_are_errors() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let f7 = FieldCtx::new(7, 1).unwrap();
        let a = MPoly::var(&f5, 2, 0);
        let b = MPoly::var(&f7, 2, 0);
        let c = MPoly::var(&f5, 3, 0);
        assert!(matches!(a.apply(PolyOp::Add(&b)), Err(PolyError::Field(_))));
        assert!(matches!(a.apply(PolyOp::Mul(&c)), Err(PolyError::Arity { .. })));
        assert!(a.eval(&[f5.one()]).is_err());
    }

    #[test]
    fn eval_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let f = poly(&f5, &["x", "y"], "x^2 - y");
        assert_eq!(f.eval(&[f5.from_i64(2), f5.from_i64(4)]).unwrap(), f5.zero());
        let one = MPoly::one(&f5, 2);
        assert_eq!(one.eval(&[f5.from_i64(3), f5.from_i64(1)]).unwrap(), f5.one());
        let f7 = FieldCtx::new(7, 1).unwrap();
        let g = poly(&f7, &["x"], "x^2+x+1");
        assert_eq!(g.eval(&[f7.from_i64(3)]).unwrap(), f7.from_i64(6));
    }

    #[test]
    fn homogenize_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let h = poly(&f5, &["x"], "x^2 + x + 1").homogenize(2).unwrap();
        assert_eq!(h, poly(&f5, &["x0", "x"], "x^2 + x*x0 + x0^2"));
        let h = poly(&f5, &["x", "y"], "x^2 + x*y").homogenize(2).unwrap();
        assert_eq!(h, poly(&f5, &["x0", "x", "y"], "x^2 + x*y"));
        let h = poly(&f5, &["x", "y"], "y").homogenize(2).unwrap();
        assert_eq!(h, poly(&f5, &["x0", "x", "y"], "y*x0"));
        assert!(matches!(
            poly(&f5, &["x"], "x^3").homogenize(2),
            Err(PolyError::DegreeTooLarge { .. })
        ));
        assert!(matches!(
            MPoly::zero(&f5, 1).homogenize(2),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn dehomogenize_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let names = ["x0", "x1"];
        assert_eq!(
            poly(&f5, &names, "x1^2 + x1*x0 + x0^2").dehomogenize(),
            poly(&f5, &["x1"], "x1^2 + x1 + 1")
        );
        assert_eq!(poly(&f5, &names, "x0^3").dehomogenize(), MPoly::one(&f5, 1));
        assert!(poly(&f5, &names, "x1*x0 - x1").dehomogenize().is_zero());
    }

    #[test]
    fn monomial_lists() {
        let m = monomials_of_degree(2, 2);
        assert_eq!(
            m,
            vec![Monomial(vec![2, 0]), Monomial(vec![1, 1]), Monomial(vec![0, 2])]
        );
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
        assert_eq!(monomials_of_degree(1, 0), vec![Monomial(vec![0])]);
        // descending order
        let m = monomials_of_degree(3, 3);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn linear_maps() {
        let f13 = FieldCtx::new(13, 1).unwrap();
        let names = ["x", "y"];
        let x = poly(&f13, &names, "x");
        let y = poly(&f13, &names, "y");
        assert_eq!(
            linear_combination(&[x.clone(), y.clone()], &[f13.one(), f13.one()]).unwrap(),
            poly(&f13, &names, "x + y")
        );
        let fs = vec![x.clone(), y.clone()];
        assert_eq!(apply_matrix(&fs, &Matrix::identity(&f13, 2)).unwrap(), fs);

        let fs = vec![
            poly(&f13, &names, "x^2 + 3*y"),
            poly(&f13, &names, "x*y - 1"),
            poly(&f13, &names, "y^2 + x + 5"),
        ];
        let b = Matrix::from_rows(
            &f13,
            vec![
                vec![f13.from_i64(2), f13.from_i64(1), f13.from_i64(0)],
                vec![f13.from_i64(0), f13.from_i64(3), f13.from_i64(7)],
                vec![f13.from_i64(1), f13.from_i64(0), f13.from_i64(4)],
            ],
        );
        let binv = b.inverse().unwrap();
        let there = apply_matrix(&fs, &b).unwrap();
        assert_eq!(apply_matrix(&there, &binv).unwrap(), fs);
        assert!(apply_matrix(&fs, &Matrix::identity(&f13, 2)).is_err());
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        let names = default_names(2);
        let f = parse_poly(&f9, &names, "[1,2]*x1^2*x2 - x2 + [0,1]").unwrap();
        let shown = f.to_string();
        assert_eq!(parse_poly(&f9, &names, &shown).unwrap(), f);
        assert_eq!(MPoly::zero(&f9, 2).to_string(), "0");
    }
}
