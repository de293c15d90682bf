//! Subfield embeddings F_{p^a} -> F_{p^b} for a | b.
//!
//! Each field carries a distinguished primitive element gamma, chosen as the
//! first primitive element (in enumeration order) such that for every maximal
//! proper subfield F_{p^c} the power gamma^{(p^b-1)/(p^c-1)} is a root of the
//! minimal polynomial of that subfield's own distinguished element.  The
//! embedding sends gamma_a to gamma_b^{(p^b-1)/(p^a-1)}, which makes every
//! chain of embeddings commute.

use std::sync::Arc;

use super::{uni, FieldCtx, FieldData, FieldElement, FieldError};

/// Precomputed embedding of one field into an extension of it.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: FieldCtx,
    dst: FieldCtx,
    /// Images of 1, u, u^2, ..., u^{a-1}; empty for a prime-field source.
    basis: Arc<Vec<u32>>,
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Self, FieldError> {
        if src.p() != dst.p() || dst.k() % src.k() != 0 {
            return Err(FieldError::NotSubfield {
                p: src.p(),
                from: src.k(),
                to: dst.k(),
            });
        }
        let basis = if src.k() == 1 || src.k() == dst.k() {
            Arc::new(Vec::new())
        } else {
            basis_images(src, dst)
        };
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            basis,
        })
    }

    pub fn source(&self) -> &FieldCtx {
        &self.src
    }

    pub fn target(&self) -> &FieldCtx {
        &self.dst
    }

    pub fn apply(&self, e: &FieldElement) -> Result<FieldElement, FieldError> {
        self.src.check(e)?;
        if self.src.k() == self.dst.k() {
            return Ok(*e);
        }
        if self.src.k() == 1 {
            return Ok(self.dst.wrap(e.code()));
        }
        let d = self.dst.data();
        let mut acc = 0u32;
        for (c, &img) in e.coeffs().iter().zip(self.basis.iter()) {
            if *c != 0 {
                acc = d.add(acc, d.mul(*c, img));
            }
        }
        Ok(self.dst.wrap(acc))
    }
}

/// Image of `e` under the fixed embedding of `src` into `dst`.
pub fn embed(src: &FieldCtx, dst: &FieldCtx, e: &FieldElement) -> Result<FieldElement, FieldError> {
    Embedding::new(src, dst)?.apply(e)
}

fn basis_images(src: &FieldCtx, dst: &FieldCtx) -> Arc<Vec<u32>> {
    let key = src.k();
    if let Some(b) = dst.data().embeddings.lock().unwrap().get(&key) {
        return b.clone();
    }
    let s = src.data();
    let d = dst.data();
    let gamma_src = compatible_generator(src);
    let gamma_dst = compatible_generator(dst);
    let exponent = (d.q as u64 - 1) / (s.q as u64 - 1);
    let gamma_img = d.pow(gamma_dst, exponent);
    // discrete log of u (code p) to base gamma_src
    let u = s.p;
    let mut cur = 1u32;
    let mut log_u = 0u64;
    while cur != u {
        cur = s.mul(cur, gamma_src);
        log_u += 1;
    }
    let u_img = d.pow(gamma_img, log_u);
    let mut basis = Vec::with_capacity(s.k as usize);
    let mut acc = 1u32;
    for _ in 0..s.k {
        basis.push(acc);
        acc = d.mul(acc, u_img);
    }
    let basis = Arc::new(basis);
    d.embeddings.lock().unwrap().insert(key, basis.clone());
    basis
}

pub(crate) fn compatible_generator(ctx: &FieldCtx) -> u32 {
    *ctx.data().compat_gen.get_or_init(|| search_generator(ctx))
}

fn search_generator(ctx: &FieldCtx) -> u32 {
    let d = ctx.data();
    let mut subfields: Vec<u32> = uni::prime_factors(d.k as u64)
        .into_iter()
        .map(|r| d.k / r as u32)
        .filter(|&c| c > 1)
        .collect();
    subfields.dedup();
    if subfields.is_empty() {
        return d.first_primitive();
    }
    // (exponent, minimal polynomial over F_p of the subfield generator)
    let conditions: Vec<(u64, Vec<u32>)> = subfields
        .iter()
        .map(|&c| {
            let sub = FieldCtx::with_cap(d.p as u64, c, u32::MAX as u64)
                .expect("subfield of a constructible field");
            let g = compatible_generator(&sub);
            let exponent = (d.q as u64 - 1) / (sub.size() - 1);
            (exponent, minimal_polynomial(sub.data(), g))
        })
        .collect();
    let order = (d.q - 1) as u64;
    let factors = uni::prime_factors(order);
    (1..d.q)
        .find(|&c| {
            factors.iter().all(|&r| d.pow(c, order / r) != 1)
                && conditions.iter().all(|(e, minpoly)| {
                    let h = d.pow(c, *e);
                    // Horner; minpoly coefficients are prime-field codes
                    minpoly.iter().rev().fold(0u32, |acc, &m| d.add(d.mul(acc, h), m)) == 0
                })
        })
        .expect("a norm-compatible primitive element exists")
}

/// Minimal polynomial over F_p of `g`, as prime-field codes low-to-high.
fn minimal_polynomial(d: &FieldData, g: u32) -> Vec<u32> {
    let mut poly = vec![1u32];
    let mut conj = g;
    for _ in 0..d.k {
        // poly *= (x - conj)
        let mut next = vec![0u32; poly.len() + 1];
        let neg = d.neg(conj);
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] = d.add(next[i + 1], c);
            next[i] = d.add(next[i], d.mul(c, neg));
        }
        poly = next;
        conj = d.pow(conj, d.p as u64);
        if conj == g {
            break;
        }
    }
    debug_assert!(poly.iter().all(|&c| c < d.p));
    poly
}
