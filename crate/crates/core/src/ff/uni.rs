//! Dense univariate polynomials over a prime field, coefficients low-to-high.
//!
//! Only what modulus selection needs: products, remainders, gcd and
//! repeated p-th powering modulo a fixed polynomial.

pub(crate) fn trim(f: &mut Vec<u64>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p); a is nonzero mod p
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse of a non-unit");
    t0.rem_euclid(p as i128) as u64
}

pub(crate) fn mul(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a * b) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `f` modulo a nonzero `m`.
pub(crate) fn rem(f: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        if c != 0 {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * mi) % p;
            }
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn gcd(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn powmod_p(h: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // h^p mod m by square-and-multiply
    let mut result = vec![1u64];
    let mut base = h.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &base, p), m, p);
        }
        e >>= 1;
        if e > 0 {
            base = rem(&mul(&base, &base, p), m, p);
        }
    }
    result
}

/// Ben-Or test: a monic `f` of degree k is irreducible iff
/// gcd(x^{p^i} - x, f) = 1 for every 1 <= i <= k/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=k / 2 {
        h = powmod_p(&h, f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        if gcd(&diff, f, p).len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree `k` over F_p, scanning
/// coefficient vectors (c_0, ..., c_{k-1}) lexicographically with c_0 most
/// significant.
pub(crate) fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let total = p.pow(k as u32);
    for t in 0..total {
        let mut f = vec![0u64; k + 1];
        let mut rest = t;
        for i in (0..k).rev() {
            f[i] = rest % p;
            rest /= p;
        }
        f[k] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
