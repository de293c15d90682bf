//! Replacing m polynomials by n (homogeneous) or n+1 (affine) polynomials
//! with the same common zeros over every extension of the base field.
//!
//! One elimination step takes n+1 homogeneous polynomials f of degree d in
//! n variables, finds a nonzero form A of degree M = n d^{n-1} in n+1
//! indeterminates with A(f) = 0, picks a point b with A(b) = c != 0, extends
//! b to an invertible matrix B (b as last column) and returns the first n
//! entries of B^{-1} f.  Writing f = B g, the coefficient of g_{n+1}^M in
//! A(B g) is c, so g_{n+1}^M lies in the ideal of g_1..g_n.

mod macaulay;

use num_bigint::BigUint;

use crate::ff::{FieldCtx, FieldElement};
use crate::linalg::{nullspace_vector_raw, Matrix};
use crate::mpoly::{apply_matrix, MPoly, Monomial, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KroneckerError {
    #[error("field of size {q} is too small: need more than {bound} elements")]
    FieldTooSmall { q: u64, bound: u64 },
    #[error("homogeneous input has mixed degrees {0:?}")]
    MixedDegrees(Vec<u32>),
    #[error("input polynomial {0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("expected {expected} polynomials, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("the zero vector has no invertible extension")]
    ZeroVector,
    #[error("the dependency form is zero")]
    ZeroForm,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Everything one elimination step computed, kept for re-verification.
#[derive(Debug, Clone)]
pub struct DependencyWitness {
    /// Dependency degree M.
    pub m: u32,
    /// The form A in n+1 indeterminates, homogeneous of degree M.
    pub a: MPoly,
    pub b: Vec<FieldElement>,
    pub bmat: Matrix,
    /// A(b).
    pub c: FieldElement,
    /// The n+1 polynomials the step started from.
    pub inputs: Vec<MPoly>,
    /// All n+1 entries of B^{-1} f; the step keeps the first n.
    pub transformed: Vec<MPoly>,
}

impl DependencyWitness {
    /// Σ A_k f^k, expanded with sparse arithmetic.
    pub fn substituted(&self) -> MPoly {
        let f = &self.inputs;
        let ctx = f[0].ctx();
        let nv = f[0].nvars();
        let mut powers: Vec<Vec<MPoly>> = f.iter().map(|fi| vec![MPoly::one(ctx, nv), fi.clone()]).collect();
        let mut total = MPoly::zero(ctx, nv);
        for (k, coeff) in self.a.terms() {
            let mut prod = MPoly::constant(ctx, nv, *coeff);
            for (i, &e) in k.exps().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &f[i];
                    powers[i].push(next);
                }
                prod = &prod * &powers[i][e as usize];
            }
            total = &total + &prod;
        }
        total
    }

    pub fn identity_holds(&self) -> bool {
        !self.a.is_zero() && self.substituted().is_zero()
    }

    pub fn leading_coefficient_holds(&self) -> bool {
        !self.c.is_zero() && self.a.eval(&self.b).ok() == Some(self.c)
    }

    /// B · g reproduces f, B is invertible and its last column is b.
    pub fn transform_holds(&self) -> bool {
        let n1 = self.b.len();
        self.bmat.column(n1 - 1) == self.b
            && !self.bmat.determinant().is_zero()
            && apply_matrix(&self.transformed, &self.bmat).ok().as_ref() == Some(&self.inputs)
    }
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub field: FieldCtx,
    /// Variables of the input (without the homogenizing one).
    pub nvars: usize,
    pub affine: bool,
    pub input: Vec<MPoly>,
    pub output: Vec<MPoly>,
    pub witnesses: Vec<DependencyWitness>,
}

/// M = n d^{n-1}.
pub fn dependency_degree(n: usize, d: u32) -> u32 {
    assert!(n >= 1 && d >= 1);
    let m = n as u32 * d.pow(n as u32 - 1);
    debug_assert!(
        binomial(m as u64 + n as u64, n as u64)
            > binomial(m as u64 * d as u64 + n as u64 - 1, n as u64 - 1)
    );
    m
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// A nonzero form A of degree `m` in f.len() indeterminates with
/// A(f_1, ..., f_{n+1}) = 0, from the nullspace of the product matrix.
pub fn find_algebraic_dependence(f: &[MPoly], m: u32) -> Result<MPoly, KroneckerError> {
    let nv = f[0].nvars();
    if f.len() != nv + 1 {
        return Err(KroneckerError::WrongCount {
            expected: nv + 1,
            found: f.len(),
        });
    }
    let d = check_homogeneous(f)?;
    let ctx = f[0].ctx().clone();
    let (tuples, cols) = macaulay::product_columns(&ctx, f, d, m);
    let nrows = cols[0].len();
    let mut rows: Vec<Vec<u32>> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let x = nullspace_vector_raw(ctx.data(), &mut rows, cols.len())
        .expect("dependency degree guarantees more columns than rank");
    let terms = tuples
        .into_iter()
        .zip(x)
        .filter(|(_, v)| *v != 0)
        .map(|(k, v)| (k.0, ctx.element(v as u64).unwrap()));
    Ok(MPoly::from_terms(&ctx, f.len(), terms)?)
}

fn check_homogeneous(f: &[MPoly]) -> Result<u32, KroneckerError> {
    for (i, fi) in f.iter().enumerate() {
        if !fi.is_homogeneous() {
            return Err(KroneckerError::NotHomogeneous(i));
        }
    }
    let degs: Vec<u32> = f.iter().filter_map(|fi| fi.degree()).collect();
    if degs.windows(2).any(|w| w[0] != w[1]) {
        return Err(KroneckerError::MixedDegrees(degs));
    }
    Ok(degs.first().copied().unwrap_or(0))
}

/// A point b with A(b) = c != 0, by descent on leading coefficients in the
/// last variable; each coordinate tries field elements in enumeration order.
pub fn find_nonvanishing_point(
    a: &MPoly,
    m: u32,
) -> Result<(Vec<FieldElement>, FieldElement), KroneckerError> {
    let ctx = a.ctx();
    if ctx.size() <= m as u64 {
        return Err(KroneckerError::FieldTooSmall {
            q: ctx.size(),
            bound: m as u64,
        });
    }
    if a.is_zero() {
        return Err(KroneckerError::ZeroForm);
    }
    let b = descend(a, a.nvars());
    let c = a.eval(&b)?;
    debug_assert!(!c.is_zero());
    Ok((b, c))
}

/// Point in the first `r` coordinates where `a` (involving only those
/// variables) does not vanish.
fn descend(a: &MPoly, r: usize) -> Vec<FieldElement> {
    let ctx = a.ctx();
    if r == 0 {
        return Vec::new();
    }
    let last = r - 1;
    let e = a.degree_in(last);
    let mut lead = MPoly::zero(ctx, a.nvars());
    for (mono, c) in a.terms() {
        if mono.exps()[last] == e {
            let mut ex = mono.exps().to_vec();
            ex[last] = 0;
            lead.add_term(Monomial(ex), *c);
        }
    }
    let mut point = descend(&lead, last);
    // coefficients of a(point, y) as a polynomial in y
    let full = |y: FieldElement, point: &[FieldElement]| {
        let mut pt = point.to_vec();
        pt.push(y);
        pt.resize(a.nvars(), ctx.zero());
        a.eval(&pt).unwrap()
    };
    let y = ctx
        .elements()
        .take(e as usize + 1)
        .find(|&y| !full(y, &point).is_zero())
        .expect("nonzero leading coefficient leaves at most e roots");
    point.push(y);
    point
}

/// Invertible matrix with last column b: pivot on the first nonzero entry
/// i of b and use e_j (j != i, increasing) for the other columns.
pub fn extend_to_invertible(b: &[FieldElement]) -> Result<Matrix, KroneckerError> {
    let i = b.iter().position(|x| !x.is_zero()).ok_or(KroneckerError::ZeroVector)?;
    let ctx = crate::ff::FieldCtx::new(b[0].characteristic() as u64, b[0].degree())
        .expect("context of an existing element");
    let n = b.len();
    let mut cols: Vec<Vec<FieldElement>> = (0..n)
        .filter(|&j| j != i)
        .map(|j| (0..n).map(|r| if r == j { ctx.one() } else { ctx.zero() }).collect())
        .collect();
    cols.push(b.to_vec());
    Ok(Matrix::from_columns(&ctx, &cols))
}

/// One elimination step from n+1 to n homogeneous polynomials.
pub fn reduce_step(f: &[MPoly]) -> Result<(Vec<MPoly>, DependencyWitness), KroneckerError> {
    let n = f[0].nvars();
    if f.len() != n + 1 {
        return Err(KroneckerError::WrongCount {
            expected: n + 1,
            found: f.len(),
        });
    }
    let d = check_homogeneous(f)?;
    let ctx = f[0].ctx();
    let m = dependency_degree(n, d.max(1));
    if ctx.size() <= m as u64 {
        return Err(KroneckerError::FieldTooSmall {
            q: ctx.size(),
            bound: m as u64,
        });
    }
    let a = find_algebraic_dependence(f, m)?;
    let (b, c) = find_nonvanishing_point(&a, m)?;
    let bmat = extend_to_invertible(&b)?;
    let binv = bmat.inverse().expect("extension of a nonzero vector is invertible");
    let transformed = apply_matrix(f, &binv)?;
    let g = transformed[..n].to_vec();
    Ok((
        g,
        DependencyWitness {
            m,
            a,
            b,
            bmat,
            c,
            inputs: f.to_vec(),
            transformed,
        },
    ))
}

/// n homogeneous polynomials of degree d in n variables with the same
/// zeros as the inputs, folding the inputs in one at a time.
pub fn reduce_homogeneous(
    ctx: &FieldCtx,
    nvars: usize,
    f: &[MPoly],
) -> Result<ReductionReport, KroneckerError> {
    let (output, witnesses) = homogeneous_core(ctx, nvars, f)?;
    Ok(ReductionReport {
        field: ctx.clone(),
        nvars,
        affine: false,
        input: f.to_vec(),
        output,
        witnesses,
    })
}

fn homogeneous_core(
    ctx: &FieldCtx,
    n: usize,
    f: &[MPoly],
) -> Result<(Vec<MPoly>, Vec<DependencyWitness>), KroneckerError> {
    for fi in f {
        if fi.ctx() != ctx || fi.nvars() != n {
            return Err(PolyError::Arity {
                expected: n,
                found: fi.nvars(),
            }
            .into());
        }
    }
    let kept: Vec<MPoly> = f.iter().filter(|fi| !fi.is_zero()).cloned().collect();
    if kept.is_empty() {
        return Ok((vec![MPoly::zero(ctx, n); n], Vec::new()));
    }
    if kept.iter().any(|fi| fi.is_constant()) {
        return Ok((unit_system(ctx, n, n), Vec::new()));
    }
    let d = check_homogeneous(&kept)?;
    if kept.len() <= n {
        let mut out = kept.clone();
        out.resize(n, kept[0].clone());
        return Ok((out, Vec::new()));
    }
    let m = dependency_degree(n, d);
    if ctx.size() <= m as u64 {
        return Err(KroneckerError::FieldTooSmall {
            q: ctx.size(),
            bound: m as u64,
        });
    }
    let mut current = kept[..n].to_vec();
    let mut witnesses = Vec::new();
    for next in &kept[n..] {
        current.push(next.clone());
        let (g, w) = reduce_step(&current)?;
        current = g;
        witnesses.push(w);
    }
    Ok((current, witnesses))
}

/// (1, 0, ..., 0): the system with no zeros.
fn unit_system(ctx: &FieldCtx, nvars: usize, len: usize) -> Vec<MPoly> {
    let mut out = vec![MPoly::zero(ctx, nvars); len];
    out[0] = MPoly::one(ctx, nvars);
    out
}

/// n+1 polynomials of degree at most d in n variables with the same affine
/// zeros as the inputs over every extension, via homogenization.
pub fn reduce_affine(
    ctx: &FieldCtx,
    nvars: usize,
    f: &[MPoly],
) -> Result<ReductionReport, KroneckerError> {
    let n = nvars;
    for fi in f {
        if fi.ctx() != ctx || fi.nvars() != n {
            return Err(PolyError::Arity {
                expected: n,
                found: fi.nvars(),
            }
            .into());
        }
    }
    let report = |output, witnesses| ReductionReport {
        field: ctx.clone(),
        nvars,
        affine: true,
        input: f.to_vec(),
        output,
        witnesses,
    };
    let kept: Vec<MPoly> = f.iter().filter(|fi| !fi.is_zero()).cloned().collect();
    if kept.is_empty() {
        return Ok(report(vec![MPoly::zero(ctx, n); n + 1], Vec::new()));
    }
    if kept.iter().any(|fi| fi.is_constant()) {
        return Ok(report(unit_system(ctx, n, n + 1), Vec::new()));
    }
    if kept.len() <= n + 1 {
        let mut out = kept.clone();
        out.resize(n + 1, kept[0].clone());
        return Ok(report(out, Vec::new()));
    }
    let d = kept.iter().map(|fi| fi.degree_or_zero()).max().unwrap();
    let bound = affine_threshold(n, d);
    if BigUint::from(ctx.size()) <= bound {
        return Err(KroneckerError::FieldTooSmall {
            q: ctx.size(),
            bound: u64::try_from(bound).unwrap_or(u64::MAX),
        });
    }
    let homog: Vec<MPoly> = kept
        .iter()
        .map(|fi| fi.homogenize(d))
        .collect::<Result<_, _>>()?;
    let (g, witnesses) = homogeneous_core(ctx, n + 1, &homog)?;
    Ok(report(g.iter().map(|gi| gi.dehomogenize()).collect(), witnesses))
}

/// (n+1) d^n, the field size the affine reduction must exceed.
pub fn affine_threshold(n: usize, d: u32) -> BigUint {
    BigUint::from(n as u64 + 1) * BigUint::from(d).pow(n as u32)
}
