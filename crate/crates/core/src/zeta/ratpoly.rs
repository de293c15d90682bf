//! Small exact linear algebra and polynomial gcd over Q.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// A solution of the (possibly over- or under-determined) system given as
/// (row, rhs) pairs in `n` unknowns, free unknowns set to zero; `None` when
/// the system is inconsistent.
pub(crate) fn solve(rows: Vec<(Vec<BigRational>, BigRational)>, n: usize) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .into_iter()
        .map(|(mut r, b)| {
            r.push(b);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for c in col..=n {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &f * &m[rank][c];
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if m[rank..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let db = b.len() - 1;
    if db == 0 {
        return vec![BigRational::zero()];
    }
    let mut r = a.to_vec();
    trim(&mut r);
    while r.len() > db && !is_zero_poly(&r) {
        let top = r.len() - 1;
        let f = &r[top] / &b[db];
        let shift = top - db;
        for (i, bi) in b.iter().enumerate() {
            let t = &f * bi;
            r[shift + i] -= t;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !is_zero_poly(&y) {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for top in (db..r.len()).rev() {
        let f = &r[top] / &b[db];
        let shift = top - db;
        for (i, bi) in b.iter().enumerate() {
            let t = &f * bi;
            r[shift + i] -= t;
        }
        q[shift] = f;
    }
    debug_assert!(is_zero_poly(&r));
    q
}

/// p/g and q/g for g = gcd(p, q) scaled to constant term 1.  Both inputs
/// must have nonzero constant terms.
pub(crate) fn reduce(p: &[BigRational], q: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut g = gcd(p, q);
    let c0 = g[0].clone();
    for c in g.iter_mut() {
        *c = &*c / &c0;
    }
    if g.len() == 1 && g[0].is_one() {
        let (mut p, mut q) = (p.to_vec(), q.to_vec());
        trim(&mut p);
        trim(&mut q);
        return (p, q);
    }
    (div_exact(p, &g), div_exact(q, &g))
}
