//! Exhaustive point counting over F_{q^k}.
//!
//! Points are enumerated as an odometer over the outer coordinates; for each
//! outer tuple every polynomial is collapsed to a univariate polynomial in
//! the last variable, which is then evaluated at every field element.  The
//! first outer coordinate is split into chunks that rayon may run in
//! parallel.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::ff::{Embedding, FieldCtx, FieldData, FieldElement, FieldError, DEFAULT_MAX_FIELD_SIZE};
use crate::mpoly::parse::{parse_poly, ParseError};
use crate::mpoly::{default_names, MPoly};

/// Default cap on q^{kn}, the number of enumerated points.
pub const DEFAULT_MAX_POINTS: u64 = 1 << 28;
/// Default cap on the number of polynomials in inclusion-exclusion.
pub const DEFAULT_MAX_IE_POLYS: usize = 24;
pub const DEFAULT_MAX_SOLUTIONS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        needed: BigUint,
        cap: u64,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Enumeration limits shared by counting and everything built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_points: u64,
    pub max_field: u64,
    pub max_ie_polys: usize,
    pub max_solutions: usize,
    /// Number of chunks the outer coordinate is split into.
    pub workers: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: DEFAULT_MAX_POINTS,
            max_field: DEFAULT_MAX_FIELD_SIZE,
            max_ie_polys: DEFAULT_MAX_IE_POLYS,
            max_solutions: DEFAULT_MAX_SOLUTIONS,
            workers: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("polynomial {index} does not belong to F_{p}^{k} in {nvars} variables")]
    Mismatch {
        index: usize,
        p: u32,
        k: u32,
        nvars: usize,
    },
}

/// Polynomials f_1..f_m in n shared variables over F_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    ctx: FieldCtx,
    nvars: usize,
    polys: Vec<MPoly>,
    degree: u32,
}

impl PolySystem {
    pub fn new(ctx: &FieldCtx, nvars: usize, polys: Vec<MPoly>) -> Result<Self, SystemError> {
        for (index, f) in polys.iter().enumerate() {
            if f.ctx() != ctx || f.nvars() != nvars {
                return Err(SystemError::Mismatch {
                    index,
                    p: ctx.p(),
                    k: ctx.k(),
                    nvars,
                });
            }
        }
        let degree = polys.iter().map(|f| f.degree_or_zero()).max().unwrap_or(0);
        Ok(PolySystem {
            ctx: ctx.clone(),
            nvars,
            polys,
            degree,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }

    /// Maximum total degree, 0 for the empty system.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The same equations read over an extension field.
    pub fn embed_into(&self, dst: &FieldCtx) -> Result<PolySystem, FieldError> {
        let emb = Embedding::new(&self.ctx, dst)?;
        let polys = self
            .polys
            .iter()
            .map(|f| {
                f.embed_into(&emb).map_err(|e| match e {
                    crate::mpoly::PolyError::Field(f) => f,
                    other => unreachable!("{other}"),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(PolySystem::new(dst, self.nvars, polys).expect("embedding keeps the shape"))
    }

    /// Equations of `self` followed by those of `other` in fresh variables.
    pub fn disjoint_union(&self, other: &PolySystem) -> PolySystem {
        assert_eq!(self.ctx, other.ctx);
        let n = self.nvars + other.nvars;
        let left: Vec<usize> = (0..self.nvars).collect();
        let right: Vec<usize> = (self.nvars..n).collect();
        let polys = self
            .polys
            .iter()
            .map(|f| f.remap_vars(n, &left))
            .chain(other.polys.iter().map(|f| f.remap_vars(n, &right)))
            .collect();
        PolySystem::new(&self.ctx, n, polys).unwrap()
    }
}

/// Text form: a header line `p k n`, then one polynomial per line in the
/// variables x1..xn.  Blank lines and `#` comments are ignored.
impl FromStr for PolySystem {
    type Err = SystemError;

    fn from_str(text: &str) -> Result<Self, SystemError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(SystemError::Format {
            line: 1,
            msg: "missing `p k n` header".into(),
        })?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| SystemError::Format {
                line: hline,
                msg: format!("header `{header}` is not three integers"),
            })?;
        let [p, k, n] = nums[..] else {
            return Err(SystemError::Format {
                line: hline,
                msg: format!("header `{header}` is not `p k n`"),
            });
        };
        let ctx = FieldCtx::new(p, k as u32)?;
        let names = default_names(n as usize);
        let polys = lines
            .map(|(line, l)| parse_poly(&ctx, &names, l).map_err(|source| SystemError::Parse { line, source }))
            .collect::<Result<_, _>>()?;
        PolySystem::new(&ctx, n as usize, polys)
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.ctx.p(), self.ctx.k(), self.nvars)?;
        for p in &self.polys {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    pub k: u32,
    pub count: BigUint,
}

/// A polynomial prepared for the inner-variable scan: each term is split
/// into its outer monomial and its exponent of the last variable.
struct Compiled {
    terms: Vec<(Vec<u32>, usize, u32)>,
    inner_degree: usize,
}

impl Compiled {
    fn new(f: &MPoly) -> Self {
        let n = f.nvars();
        let terms: Vec<(Vec<u32>, usize, u32)> = f
            .terms()
            .map(|(m, c)| (m.exps()[..n - 1].to_vec(), m.exps()[n - 1] as usize, c.code()))
            .collect();
        let inner_degree = terms.iter().map(|t| t.1).max().unwrap_or(0);
        Compiled {
            terms,
            inner_degree,
        }
    }

    /// Coefficients in the last variable at an outer point given as power
    /// tables `pows[var][e]`.
    fn univariate(&self, d: &FieldData, pows: &[Vec<u32>], out: &mut Vec<u32>) {
        out.clear();
        out.resize(self.inner_degree + 1, 0);
        for (outer, e, c) in &self.terms {
            let mut t = *c;
            for (v, &x) in outer.iter().enumerate() {
                if x != 0 {
                    t = d.mul(t, pows[v][x as usize]);
                }
            }
            out[*e] = d.add(out[*e], t);
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
    }
}

#[inline]
fn horner(d: &FieldData, coeffs: &[u32], y: u32) -> u32 {
    let mut acc = 0u32;
    for &c in coeffs.iter().rev() {
        acc = d.add(d.mul(acc, y), c);
    }
    acc
}

/// The system over F_{q^k}, with everything the scan needs.
struct Prepared {
    ext: FieldCtx,
    n: usize,
    polys: Vec<MPoly>,
    compiled: Vec<Compiled>,
    max_outer: Vec<usize>,
}

fn prepare(f: &PolySystem, k: u32, limits: &Limits, max_polys: Option<usize>) -> Result<Prepared, CountError> {
    let base = f.ctx();
    let ext = FieldCtx::with_cap(base.p() as u64, base.k() * k, limits.max_field)?;
    if let Some(cap) = max_polys {
        if f.polys().len() > cap {
            return Err(CountError::CapExceeded {
                what: "polynomials in inclusion-exclusion",
                needed: BigUint::from(f.polys().len()),
                cap: cap as u64,
            });
        }
    }
    let points = BigUint::from(ext.size()).pow(f.nvars() as u32);
    if points > BigUint::from(limits.max_points) {
        return Err(CountError::CapExceeded {
            what: "points to enumerate",
            needed: points,
            cap: limits.max_points,
        });
    }
    let sys = f.embed_into(&ext)?;
    let n = sys.nvars();
    let compiled = if n == 0 {
        Vec::new()
    } else {
        sys.polys().iter().map(Compiled::new).collect()
    };
    let max_outer = (0..n.saturating_sub(1))
        .map(|v| sys.polys().iter().map(|p| p.degree_in(v) as usize).max().unwrap_or(0))
        .collect();
    Ok(Prepared {
        ext,
        n,
        polys: sys.polys().to_vec(),
        compiled,
        max_outer,
    })
}

impl Prepared {
    fn chunks(&self, workers: usize) -> Vec<(u32, u32)> {
        let q = self.ext.size() as u32;
        if self.n < 2 {
            return vec![(0, 1)];
        }
        let w = workers.clamp(1, q as usize) as u32;
        (0..w).map(|i| (q * i / w, q * (i + 1) / w)).collect()
    }

    /// Calls `visit(outer, univariates)` for every outer tuple whose first
    /// coordinate lies in `range`.
    fn scan_outer<F: FnMut(&[u32], &[Vec<u32>])>(&self, range: (u32, u32), mut visit: F) {
        let d = self.ext.data();
        let q = self.ext.size() as u32;
        let outer_n = self.n - 1;
        let mut outer: Vec<u32> = vec![0; outer_n];
        if outer_n > 0 {
            outer[0] = range.0;
        }
        let mut pows: Vec<Vec<u32>> = self.max_outer.iter().map(|&m| vec![1; m + 1]).collect();
        let mut uni: Vec<Vec<u32>> = vec![Vec::new(); self.compiled.len()];
        loop {
            if outer_n > 0 && outer[0] >= range.1 {
                return;
            }
            for (v, &x) in outer.iter().enumerate() {
                for e in 1..pows[v].len() {
                    pows[v][e] = d.mul(pows[v][e - 1], x);
                }
            }
            for (c, u) in self.compiled.iter().zip(uni.iter_mut()) {
                c.univariate(d, &pows, u);
            }
            visit(&outer, &uni);
            // odometer, last outer coordinate fastest
            let mut i = outer_n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                outer[i] += 1;
                if outer[i] < q || i == 0 {
                    break;
                }
                outer[i] = 0;
            }
        }
    }

    fn count_range(&self, range: (u32, u32)) -> u64 {
        let d = self.ext.data();
        let q = self.ext.size() as u32;
        let mut total = 0u64;
        self.scan_outer(range, |_, uni| {
            // a nonzero constant rules out the whole line
            if uni.iter().any(|u| u.len() == 1 && u[0] != 0) {
                return;
            }
            let live: Vec<&Vec<u32>> = uni.iter().filter(|u| !(u.len() == 1 && u[0] == 0)).collect();
            if live.is_empty() {
                total += q as u64;
                return;
            }
            for y in 0..q {
                if live.iter().all(|u| horner(d, u, y) == 0) {
                    total += 1;
                }
            }
        });
        total
    }
}

/// N_{q^k}(F): common zeros of the system in F_{q^k}^n.
pub fn count_points(f: &PolySystem, k: u32, limits: &Limits) -> Result<BigUint, CountError> {
    let prep = prepare(f, k, limits, None)?;
    if prep.n == 0 {
        return Ok(BigUint::from(prep.polys.iter().all(|p| p.is_zero()) as u32));
    }
    let total: u64 = prep
        .chunks(limits.workers)
        .into_par_iter()
        .map(|r| prep.count_range(r))
        .sum();
    Ok(BigUint::from(total))
}

/// Σ_{S ⊆ [m]} (-1)^{|S|} #{x : f_S(x) != 0} with f_S = Π_{i∈S} f_i,
/// accumulated point by point over every subset product.
pub fn count_points_ie(f: &PolySystem, k: u32, limits: &Limits) -> Result<BigUint, CountError> {
    let prep = prepare(f, k, limits, Some(limits.max_ie_polys))?;
    let d = prep.ext.data();
    let q = prep.ext.size() as u32;
    let per_point = |vals: &[u32]| -> i64 {
        // iterative DFS over subsets with running products
        let m = vals.len();
        let mut sum = 0i64;
        let mut stack: Vec<(usize, u32, i64)> = vec![(0, 1, 1)];
        while let Some((next, prod, sign)) = stack.pop() {
            if prod != 0 {
                sum += sign;
            }
            for i in next..m {
                stack.push((i + 1, d.mul(prod, vals[i]), -sign));
            }
        }
        sum
    };
    let total: i128 = if prep.n == 0 {
        let vals: Vec<u32> = prep.polys.iter().map(|p| p.eval_codes(&[])).collect();
        per_point(&vals) as i128
    } else {
        prep.chunks(limits.workers)
            .into_par_iter()
            .map(|r| {
                let mut acc = 0i128;
                let mut vals = vec![0u32; prep.polys.len()];
                prep.scan_outer(r, |_, uni| {
                    for y in 0..q {
                        for (v, u) in vals.iter_mut().zip(uni) {
                            *v = horner(d, u, y);
                        }
                        acc += per_point(&vals) as i128;
                    }
                });
                acc
            })
            .sum()
    };
    let total = BigInt::from(total);
    Ok(total.to_biguint().expect("inclusion-exclusion sum is a count"))
}

/// All common zeros over F_{q^k}, sorted by enumeration codes with the
/// first coordinate most significant.
pub fn solutions(f: &PolySystem, k: u32, limits: &Limits) -> Result<Vec<Vec<FieldElement>>, CountError> {
    let prep = prepare(f, k, limits, None)?;
    if prep.n == 0 {
        let all = prep.polys.iter().all(|p| p.is_zero());
        return Ok(if all { vec![Vec::new()] } else { Vec::new() });
    }
    let d = prep.ext.data();
    let q = prep.ext.size() as u32;
    let cap = limits.max_solutions;
    let parts: Vec<Result<Vec<Vec<u32>>, usize>> = prep
        .chunks(limits.workers)
        .into_par_iter()
        .map(|r| {
            let mut out = Vec::new();
            let mut overflow = false;
            prep.scan_outer(r, |outer, uni| {
                if overflow {
                    return;
                }
                for y in 0..q {
                    if uni.iter().all(|u| horner(d, u, y) == 0) {
                        let mut pt = outer.to_vec();
                        pt.push(y);
                        out.push(pt);
                        if out.len() > cap {
                            overflow = true;
                            return;
                        }
                    }
                }
            });
            if overflow {
                Err(out.len())
            } else {
                Ok(out)
            }
        })
        .collect();
    let mut all = Vec::new();
    for part in parts {
        match part {
            Ok(v) => all.extend(v),
            Err(n) => {
                return Err(CountError::CapExceeded {
                    what: "solutions to list",
                    needed: BigUint::from(n),
                    cap: cap as u64,
                })
            }
        }
        if all.len() > cap {
            return Err(CountError::CapExceeded {
                what: "solutions to list",
                needed: BigUint::from(all.len()),
                cap: cap as u64,
            });
        }
    }
    // chunks are contiguous in the first coordinate, so this is already
    // sorted; sort anyway to keep the contract independent of the scan
    all.sort_unstable();
    Ok(all
        .into_iter()
        .map(|pt| pt.into_iter().map(|c| prep.ext.element(c as u64).unwrap()).collect())
        .collect())
}

/// Counts for k = 1..=k_max.
pub fn count_table(f: &PolySystem, k_max: u32, limits: &Limits) -> Result<Vec<CountRecord>, CountError> {
    (1..=k_max)
        .map(|k| count_points(f, k, limits).map(|count| CountRecord { k, count }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(text: &str) -> PolySystem {
        text.parse().unwrap()
    }

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn spec_examples() {
        let lim = Limits::default();
        assert_eq!(count_points(&sys("5 1 1\nx1"), 1, &lim).unwrap(), n(1));
        assert_eq!(count_points(&sys("5 1 2\nx1^2 - x2"), 1, &lim).unwrap(), n(5));
        // x^2 = 4, x^3 = 3 over F_5: x = 2 only
        assert_eq!(count_points(&sys("5 1 1\nx1^2 - 4\nx1^3 - 3"), 1, &lim).unwrap(), n(1));
        assert_eq!(count_points_ie(&sys("3 1 1\nx1\nx1 + 1"), 1, &lim).unwrap(), n(0));
    }

    #[test]
    fn solution_lists() {
        let lim = Limits::default();
        let s = solutions(&sys("2 1 1\nx1^2 + 1"), 1, &lim).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0][0].code(), 1);
        let s = solutions(&sys("3 1 1"), 1, &lim).unwrap();
        assert_eq!(s.iter().map(|p| p[0].code()).collect::<Vec<_>>(), vec![0, 1, 2]);
        let s = solutions(&sys("3 1 1\nx1^2 + 1"), 2, &lim).unwrap();
        let f9 = FieldCtx::new(3, 2).unwrap();
        let roots: Vec<FieldElement> = f9
            .elements()
            .filter(|x| f9.add(&f9.mul(x, x), &f9.one()).is_zero())
            .collect();
        assert_eq!(s, roots.into_iter().map(|r| vec![r]).collect::<Vec<_>>());
    }

    #[test]
    fn empty_and_inconsistent_systems() {
        let lim = Limits::default();
        assert_eq!(count_points(&sys("3 1 2"), 2, &lim).unwrap(), n(81));
        assert_eq!(count_points(&sys("3 1 2\nx1\n2"), 1, &lim).unwrap(), n(0));
        assert_eq!(count_points_ie(&sys("3 1 2\nx1\n2"), 1, &lim).unwrap(), n(0));
        assert_eq!(count_points(&sys("7 1 0"), 1, &lim).unwrap(), n(1));
        assert_eq!(count_points(&sys("7 1 0\n0"), 1, &lim).unwrap(), n(1));
        assert_eq!(count_points(&sys("7 1 0\n3"), 1, &lim).unwrap(), n(0));
        assert_eq!(count_points_ie(&sys("7 1 0\n3"), 1, &lim).unwrap(), n(0));
    }

    #[test]
    fn worker_partitions_agree() {
        let s = sys("7 1 3\nx1*x2 - x3^2\nx1 + x2 + x3 - 1");
        let counts: Vec<BigUint> = [1, 2, 3, 7, 50]
            .iter()
            .map(|&w| {
                let lim = Limits {
                    workers: w,
                    ..Limits::default()
                };
                count_points(&s, 1, &lim).unwrap()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(counts[0], n(solutions(&s, 1, &Limits::default()).unwrap().len() as u64));
    }

    #[test]
    fn caps_are_reported() {
        let lim = Limits {
            max_points: 100,
            ..Limits::default()
        };
        assert!(matches!(
            count_points(&sys("11 1 2\nx1"), 1, &lim),
            Err(CountError::CapExceeded { .. })
        ));
        let lim = Limits {
            max_ie_polys: 1,
            ..Limits::default()
        };
        assert!(matches!(
            count_points_ie(&sys("3 1 1\nx1\nx1"), 1, &lim),
            Err(CountError::CapExceeded { .. })
        ));
    }

    #[test]
    fn system_text_round_trip_and_errors() {
        let s = sys("# comment\n7 1 2\n\nx1^2 + 2*x2 # trailing\n");
        assert_eq!(s.polys().len(), 1);
        assert!(matches!("9 1 2\nx1".parse::<PolySystem>(), Err(SystemError::Field(_))));
        let s = sys("3 2 2\n[1,2]*x1^2 + x2\nx1*x2 - 1");
        assert_eq!(s.to_string().parse::<PolySystem>().unwrap(), s);
        assert!(matches!("3 1\nx1".parse::<PolySystem>(), Err(SystemError::Format { .. })));
        assert!(matches!(
            "3 1 1\nx2".parse::<PolySystem>(),
            Err(SystemError::Parse { line: 2, .. })
        ));
    }
}
