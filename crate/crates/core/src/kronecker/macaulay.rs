//! Dense products f^k of homogeneous polynomials, indexed by monomial rank.

use crate::ff::FieldCtx;
use crate::mpoly::{monomials_of_degree, MPoly, Monomial};

/// Ranks monomials of a fixed number of variables within their degree,
/// matching the order of [`monomials_of_degree`].
pub(crate) struct Ranker {
    n: usize,
    binom: Vec<Vec<usize>>,
}

impl Ranker {
    pub fn new(n: usize, max_degree: u32) -> Self {
        // only columns 0..=n are read
        let size = max_degree as usize + n + 2;
        let mut binom = vec![vec![0usize; n + 1]; size];
        for i in 0..size {
            binom[i][0] = 1;
            for j in 1..=i.min(n) {
                binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
            }
        }
        Ranker { n, binom }
    }

    /// Number of monomials of degree exactly `d`.
    pub fn count(&self, d: u32) -> usize {
        self.binom[d as usize + self.n - 1][self.n - 1]
    }

    pub fn rank(&self, e: &[u32]) -> usize {
        let mut left: u32 = e.iter().sum();
        let mut r = 0;
        for i in 0..self.n.saturating_sub(1) {
            if left > e[i] {
                // monomials with a larger i-th exponent: degree <= left-e_i-1
                // in the n-i-1 later variables
                let rest = self.n - i - 1;
                r += self.binom[(left - e[i] - 1) as usize + rest][rest];
            }
            left -= e[i];
        }
        r
    }
}

/// Coefficient columns of every product f_1^{k_1} ... f_{N+1}^{k_{N+1}} with
/// Σ k_i = `m`, over the degree-m·d monomials in N variables.  Returns the
/// exponent tuples (descending graded-lex) and the columns in that order.
pub(crate) fn product_columns(
    ctx: &FieldCtx,
    f: &[MPoly],
    d: u32,
    m: u32,
) -> (Vec<Monomial>, Vec<Vec<u32>>) {
    let nv = f[0].nvars();
    let nf = f.len();
    let data = ctx.data();
    let vr = Ranker::new(nv, m * d);
    let kr = Ranker::new(nf, m);

    // distinct term monomials across the inputs
    let mut shapes: Vec<Monomial> = Vec::new();
    let terms: Vec<Vec<(usize, u32)>> = f
        .iter()
        .map(|fi| {
            fi.terms()
                .map(|(mono, c)| {
                    let idx = shapes.iter().position(|s| s == mono).unwrap_or_else(|| {
                        shapes.push(mono.clone());
                        shapes.len() - 1
                    });
                    (idx, c.code())
                })
                .collect()
        })
        .collect();

    let mut prev_tuples = vec![Monomial::one(nf)];
    let mut prev_cols: Vec<Vec<u32>> = vec![vec![1u32]];
    for t in 1..=m {
        let src_monos = monomials_of_degree(nv, (t - 1) * d);
        // shift[s][j] = rank of src_monos[j] * shapes[s]
        let shift: Vec<Vec<usize>> = shapes
            .iter()
            .map(|s| src_monos.iter().map(|mj| vr.rank(&mj.mul(s).0)).collect())
            .collect();
        let len = vr.count(t * d);
        let tuples = monomials_of_degree(nf, t);
        let cols: Vec<Vec<u32>> = tuples
            .iter()
            .map(|k| {
                let i = k.0.iter().position(|&e| e > 0).unwrap();
                let mut parent = k.0.clone();
                parent[i] -= 1;
                let src = &prev_cols[kr.rank(&parent)];
                let mut out = vec![0u32; len];
                for (j, &v) in src.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    for &(s, c) in &terms[i] {
                        let o = &mut out[shift[s][j]];
                        *o = data.add(*o, data.mul(v, c));
                    }
                }
                out
            })
            .collect();
        debug_assert!(tuples.iter().enumerate().all(|(r, k)| kr.rank(&k.0) == r));
        prev_tuples = tuples;
        prev_cols = cols;
    }
    (prev_tuples, prev_cols)
}
