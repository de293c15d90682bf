//! Exact arithmetic in F_p and F_{p^k}.
//!
//! Every field is a single polynomial-basis extension F_p[u]/(m(u)) where m
//! is the first monic irreducible of degree k in a fixed enumeration order, so
//! a given (p, k) always yields the same field.  Elements are stored as the
//! integer code `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` of their coefficient
//! vector; field enumeration walks codes upward from zero.
//!
//! Contexts are interned per (p, k) and shared behind an `Arc`.  Fields of at
//! most 2^20 elements carry log/antilog/Zech tables so that products and sums
//! are a handful of lookups.

mod embed;
pub(crate) mod uni;

pub use embed::{embed, Embedding};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Default cap on the number of elements of a constructed field.
pub const DEFAULT_MAX_FIELD_SIZE: u64 = 10_000_000;

const HARD_MAX_FIELD_SIZE: u64 = u32::MAX as u64;
const TABLE_CAP: u64 = 1 << 20;
const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("F_{p}^{k} exceeds the field-size cap of {cap} elements")]
    TooLarge { p: u64, k: u32, cap: u64 },
    #[error("element of F_{}^{} used with F_{}^{}", .found.0, .found.1, .expected.0, .expected.1)]
    Mismatch {
        expected: (u32, u32),
        found: (u32, u32),
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot embed F_{p}^{from} into F_{p}^{to}")]
    NotSubfield { p: u32, from: u32, to: u32 },
    #[error("coefficient vector of length {len} does not fit a degree-{k} extension")]
    BadCoefficients { len: usize, k: u32 },
}

/// An element of some F_{p^k}. Carries its field's (p, k) so that mixing
/// elements of different fields is detected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    p: u32,
    k: u32,
    code: u32,
}

impl FieldElement {
    /// Position of the element in the field enumeration order.
    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    /// Residues c_0..c_{k-1} of the polynomial-basis representation.
    pub fn coeffs(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut c = self.code;
        for _ in 0..self.k {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    /// True for elements of the prime subfield.
    pub fn is_prime_field_element(&self) -> bool {
        self.code < self.p
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.code)
        } else {
            let parts: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
            write!(f, "[{}]", parts.join(","))
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Operand for [`FieldCtx::apply`].
#[derive(Debug, Clone, Copy)]
pub enum FieldOp<'a> {
    Add(&'a FieldElement),
    Sub(&'a FieldElement),
    Mul(&'a FieldElement),
    Div(&'a FieldElement),
    Pow(&'a BigUint),
    Inv,
    Neg,
}

struct Tables {
    log: Vec<u32>,
    /// g^i for 0 <= i < 2(q-1), so sums of two logs need no reduction.
    exp: Vec<u32>,
    /// zech[d] = log(1 + g^d), or NO_LOG when 1 + g^d = 0.
    zech: Vec<u32>,
    order: u32,
}

pub(crate) struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
    compat_gen: OnceLock<u32>,
    embeddings: Mutex<HashMap<u32, Arc<Vec<u32>>>>,
}

/// Shared handle to an immutable field F_{p^k}.
#[derive(Clone)]
pub struct FieldCtx(Arc<FieldData>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.k)
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}

impl Eq for FieldCtx {}

fn registry() -> &'static Mutex<HashMap<(u32, u32), FieldCtx>> {
    static REGISTRY: OnceLock<Mutex<HashMap<(u32, u32), FieldCtx>>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldCtx {
    /// F_{p^k} under the default field-size cap.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        Self::with_cap(p, k, DEFAULT_MAX_FIELD_SIZE)
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !uni::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let limit = cap.min(HARD_MAX_FIELD_SIZE);
        let too_large = FieldError::TooLarge { p, k, cap: limit };
        let size = p.checked_pow(k).ok_or_else(|| too_large.clone())?;
        if size > limit {
            return Err(too_large);
        }
        let key = (p as u32, k);
        if let Some(ctx) = registry().lock().unwrap().get(&key) {
            return Ok(ctx.clone());
        }
        // built outside the lock: generator searches for embeddings recurse
        // into subfield construction
        let ctx = FieldCtx(Arc::new(FieldData::build(p as u32, k)));
        let mut reg = registry().lock().unwrap();
        Ok(reg.entry(key).or_insert(ctx).clone())
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    /// Number of elements q = p^k.
    pub fn size(&self) -> u64 {
        self.0.q as u64
    }

    /// Defining polynomial, monic, coefficients low-to-high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub(crate) fn data(&self) -> &FieldData {
        &self.0
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        e.p == self.0.p && e.k == self.0.k
    }

    pub fn check(&self, e: &FieldElement) -> Result<(), FieldError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(FieldError::Mismatch {
                expected: (self.0.p, self.0.k),
                found: (e.p, e.k),
            })
        }
    }

    #[inline]
    fn member(&self, e: &FieldElement) -> u32 {
        assert!(
            self.contains(e),
            "element of F_{}^{} used with {:?}",
            e.p,
            e.k,
            self
        );
        e.code
    }

    #[inline]
    pub(crate) fn wrap(&self, code: u32) -> FieldElement {
        debug_assert!(code < self.0.q);
        FieldElement {
            p: self.0.p,
            k: self.0.k,
            code,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.wrap(v.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        self.wrap((v % self.0.p as u64) as u32)
    }

    pub fn from_biguint(&self, v: &BigUint) -> FieldElement {
        let r = v % BigUint::from(self.0.p);
        self.wrap(r.to_u32().expect("residue below p"))
    }

    /// Element with polynomial-basis coefficients `c` (low-to-high, entries
    /// reduced mod p, missing trailing entries zero).
    pub fn from_coeffs(&self, c: &[u64]) -> Result<FieldElement, FieldError> {
        if c.len() > self.0.k as usize {
            return Err(FieldError::BadCoefficients {
                len: c.len(),
                k: self.0.k,
            });
        }
        let p = self.0.p as u64;
        let mut code = 0u64;
        for &ci in c.iter().rev() {
            code = code * p + ci % p;
        }
        Ok(self.wrap(code as u32))
    }

    /// Element at position `code` of the enumeration order.
    pub fn element(&self, code: u64) -> Option<FieldElement> {
        (code < self.0.q as u64).then(|| self.wrap(code as u32))
    }

    /// The generator u of the extension (equal to 0 in a prime field, whose
    /// modulus is x).
    pub fn generator(&self) -> FieldElement {
        if self.0.k == 1 {
            self.zero()
        } else {
            self.wrap(self.0.p)
        }
    }

    /// All q elements in enumeration order, starting at zero.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(move |c| self.wrap(c))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.wrap(self.0.add(self.member(a), self.member(b)))
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.wrap(self.0.sub(self.member(a), self.member(b)))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.wrap(self.0.mul(self.member(a), self.member(b)))
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.wrap(self.0.neg(self.member(a)))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.wrap(self.0.inv(a.code)))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        let binv = self.inv(b)?;
        Ok(self.mul(a, &binv))
    }

    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        let code = self.member(a);
        if e.is_zero() {
            return self.one();
        }
        if code == 0 {
            return self.zero();
        }
        // the multiplicative group has order q - 1
        let r = (e % BigUint::from(self.0.q - 1)).to_u64().unwrap();
        let r = if r == 0 { (self.0.q - 1) as u64 } else { r };
        self.wrap(self.0.pow(code, r))
    }

    pub fn pow_u64(&self, a: &FieldElement, e: u64) -> FieldElement {
        self.wrap(self.0.pow(self.member(a), e))
    }

    /// Checked arithmetic: rejects foreign elements and zero divisors.
    pub fn apply(&self, a: &FieldElement, op: FieldOp<'_>) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        Ok(match op {
            FieldOp::Add(b) => {
                self.check(b)?;
                self.add(a, b)
            }
            FieldOp::Sub(b) => {
                self.check(b)?;
                self.sub(a, b)
            }
            FieldOp::Mul(b) => {
                self.check(b)?;
                self.mul(a, b)
            }
            FieldOp::Div(b) => self.div(a, b)?,
            FieldOp::Pow(e) => self.pow(a, e),
            FieldOp::Inv => self.inv(a)?,
            FieldOp::Neg => self.neg(a),
        })
    }
}

impl FieldData {
    fn build(p: u32, k: u32) -> Self {
        let modulus: Vec<u32> = uni::first_irreducible(p as u64, k)
            .into_iter()
            .map(|c| c as u32)
            .collect();
        let q = (p as u64).pow(k) as u32;
        let mut data = FieldData {
            p,
            k,
            q,
            modulus,
            tables: None,
            compat_gen: OnceLock::new(),
            embeddings: Mutex::new(HashMap::new()),
        };
        if (q as u64) <= TABLE_CAP && q > 2 {
            data.tables = Some(data.build_tables());
        }
        data
    }

    fn build_tables(&self) -> Tables {
        let order = self.q - 1;
        let g = self.first_primitive();
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut e = 1u32;
        for _ in 0..2 * order {
            exp.push(e);
            e = self.plain_mul(e, g);
        }
        let mut log = vec![NO_LOG; self.q as usize];
        for (i, &v) in exp.iter().take(order as usize).enumerate() {
            log[v as usize] = i as u32;
        }
        let zech = if self.k > 1 {
            (0..order)
                .map(|d| {
                    let s = self.plain_add(exp[d as usize], 1);
                    if s == 0 {
                        NO_LOG
                    } else {
                        log[s as usize]
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        Tables {
            log,
            exp,
            zech,
            order,
        }
    }

    pub(crate) fn first_primitive(&self) -> u32 {
        let order = (self.q - 1) as u64;
        let factors = uni::prime_factors(order);
        (1..self.q)
            .find(|&c| factors.iter().all(|&r| self.plain_pow(c, order / r) != 1))
            .expect("multiplicative group is cyclic")
    }

    pub(crate) fn p(&self) -> u32 {
        self.p
    }

    pub(crate) fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    fn decode(&self, mut code: u32, out: &mut [u64; 32]) {
        for d in out.iter_mut().take(self.k as usize) {
            *d = (code % self.p) as u64;
            code /= self.p;
        }
    }

    #[inline]
    fn encode(&self, digits: &[u64]) -> u32 {
        let mut code = 0u64;
        for &d in digits.iter().take(self.k as usize).rev() {
            code = code * self.p as u64 + d;
        }
        code as u32
    }

    fn plain_add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut da, mut db) = ([0u64; 32], [0u64; 32]);
        self.decode(a, &mut da);
        self.decode(b, &mut db);
        let p = self.p as u64;
        for i in 0..self.k as usize {
            da[i] = (da[i] + db[i]) % p;
        }
        self.encode(&da)
    }

    fn plain_neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut da = [0u64; 32];
        self.decode(a, &mut da);
        let p = self.p as u64;
        for d in da.iter_mut().take(self.k as usize) {
            *d = (p - *d) % p;
        }
        self.encode(&da)
    }

    fn plain_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.k == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let k = self.k as usize;
        let (mut da, mut db) = ([0u64; 32], [0u64; 32]);
        self.decode(a, &mut da);
        self.decode(b, &mut db);
        let mut prod = [0u64; 64];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        for deg in (k..2 * k - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                let idx = deg - k + i;
                prod[idx] = (prod[idx] + (p - c) * self.modulus[i] as u64) % p;
            }
        }
        self.encode(&prod[..k])
    }

    fn plain_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut result = 1u32;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.plain_mul(result, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.plain_mul(base, base);
            }
        }
        result
    }

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        match &self.tables {
            Some(t) => {
                if a == 0 {
                    return b;
                }
                if b == 0 {
                    return a;
                }
                let la = t.log[a as usize];
                let lb = t.log[b as usize];
                let mut d = lb + t.order - la;
                if d >= t.order {
                    d -= t.order;
                }
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    0
                } else {
                    t.exp[(la + z) as usize]
                }
            }
            None => self.plain_add(a, b),
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                if a == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.order / 2) as usize]
                }
            }
            None => self.plain_neg(a),
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
            None => self.plain_mul(a, b),
        }
    }

    /// Inverse of a nonzero code.
    pub(crate) fn inv(&self, a: u32) -> u32 {
        debug_assert_ne!(a, 0);
        match &self.tables {
            Some(t) => t.exp[(t.order - t.log[a as usize]) as usize],
            None if self.k == 1 => uni::inv_mod(a as u64, self.p as u64) as u32,
            None => self.plain_pow(a, (self.q - 2) as u64),
        }
    }

    pub(crate) fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => {
                let l = (t.log[a as usize] as u64 * (e % t.order as u64)) % t.order as u64;
                t.exp[l as usize]
            }
            None => self.plain_pow(a, e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f5.modulus(), &[0, 1]);
        assert_eq!(f5.size(), 5);
    }

    #[test]
    fn f9_modulus_and_defining_relation() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let u = f9.generator();
        assert_eq!(u.coeffs(), vec![0, 1]);
        assert_eq!(f9.mul(&u, &u), f9.from_i64(2));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldCtx::new(5, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(
            FieldCtx::with_cap(2, 30, 1 << 20),
            Err(FieldError::TooLarge { .. })
        ));
    }

    #[test]
    fn small_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f5.add(&f5.from_i64(3), &f5.from_i64(4)), f5.from_i64(2));
        let f7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f7.inv(&f7.from_i64(3)).unwrap(), f7.from_i64(5));
        assert_eq!(f7.inv(&f7.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn mismatched_contexts_are_rejected() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let f25 = FieldCtx::new(5, 2).unwrap();
        let a = f5.one();
        let b = f25.one();
        assert!(matches!(
            f5.apply(&a, FieldOp::Add(&b)),
            Err(FieldError::Mismatch { .. })
        ));
        assert!(f25.inv(&a).is_err());
    }

    #[test]
    fn identical_parameters_share_a_context() {
        let a = FieldCtx::new(3, 3).unwrap();
        let b = FieldCtx::new(3, 3).unwrap();
        assert!(Arc::ptr_eq(&a.0, &b.0));
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn enumeration_cardinality() {
        for (p, k, n) in [(2, 1, 2), (3, 2, 9), (13, 1, 13)] {
            let f = FieldCtx::new(p, k).unwrap();
            let all: Vec<_> = f.elements().collect();
            assert_eq!(all.len(), n);
            assert!(all[0].is_zero());
            let mut dedup = all.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), n);
        }
        let f2: Vec<_> = FieldCtx::new(2, 1).unwrap().elements().collect();
        assert_eq!(f2.iter().map(|e| e.code()).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn pow_with_big_exponent() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        let u = f9.generator();
        // u^4 = 1 since u^2 = -1; 10^30 is divisible by 4
        let e = BigUint::from(10u32).pow(30);
        assert_eq!(f9.pow(&u, &e), f9.one());
        assert_eq!(f9.pow(&f9.zero(), &BigUint::from(0u32)), f9.one());
        assert_eq!(f9.pow(&f9.zero(), &BigUint::from(3u32)), f9.zero());
    }

    #[test]
    fn table_and_plain_arithmetic_agree() {
        for (p, k) in [(2u64, 4u32), (3, 3), (5, 2), (13, 2), (7, 1)] {
            let ctx = FieldCtx::new(p, k).unwrap();
            let d = ctx.data();
            for a in 0..d.q {
                for b in 0..d.q {
                    assert_eq!(d.mul(a, b), d.plain_mul(a, b));
                    assert_eq!(d.add(a, b), d.plain_add(a, b));
                }
                assert_eq!(d.neg(a), d.plain_neg(a));
            }
        }
    }

    #[test]
    fn untabled_extension_inverse() {
        // 2^21 elements: above the table cap
        let ctx = FieldCtx::new(2, 21).unwrap();
        assert!(ctx.data().tables.is_none());
        let a = ctx.from_coeffs(&[1, 1, 0, 1]).unwrap();
        let ai = ctx.inv(&a).unwrap();
        assert_eq!(ctx.mul(&a, &ai), ctx.one());
    }
}
