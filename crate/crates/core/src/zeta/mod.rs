//! Zeta functions Z(F, T) = exp(Σ N_{q^k}(F) T^k / k) from exact counts.

mod pipeline;
mod ratpoly;

pub use pipeline::{zeta_main, Branch, Incomplete, KProvenance, ZetaConfig, ZetaReport};

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::count::CountRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZetaError {
    #[error("counts must run over k = 1, 2, ...; found k = {found} at position {position}")]
    NonContiguous { position: usize, found: u32 },
    #[error("series coefficient {j} is not an integer; the counts are inconsistent")]
    NonIntegralSeries { j: usize },
    #[error("series coefficient {j} is negative; the counts are inconsistent")]
    NegativeSeries { j: usize },
    #[error("{have} counts supplied, budget {budget} needs {need}")]
    InsufficientCounts { have: usize, need: usize, budget: u32 },
    #[error("no rational function of total degree at most {budget} fits the counts")]
    NoFit { budget: u32 },
    #[error("numerator and denominator must have constant term 1")]
    NotNormalized,
    #[error("the zeta function predicts a negative count at k = {k}")]
    NegativeCount { k: u32 },
}

/// (4d+5)^{2n+1}, a bound on deg numer + deg denom.
pub fn bombieri_bound(n: u32, d: u32) -> BigUint {
    BigUint::from(4 * d as u64 + 5).pow(2 * n + 1)
}

/// Integer polynomial in T, coefficients ascending, no trailing zeros.
pub type IntPoly = Vec<BigInt>;

/// numer / denom with integer coefficients, both with constant term 1 and
/// no common factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZetaFn {
    numer: IntPoly,
    denom: IntPoly,
}

impl ZetaFn {
    /// Reduces numer/denom by their gcd over Q.  Fails unless both have
    /// constant term 1 and the reduced form still has integer coefficients.
    pub fn new(numer: IntPoly, denom: IntPoly) -> Result<Self, ZetaError> {
        let one = BigInt::one();
        if numer.first() != Some(&one) || denom.first() != Some(&one) {
            return Err(ZetaError::NotNormalized);
        }
        let to_q = |p: &IntPoly| -> Vec<BigRational> { p.iter().map(|c| BigRational::from(c.clone())).collect() };
        let (n, d) = ratpoly::reduce(&to_q(&numer), &to_q(&denom));
        let back = |p: Vec<BigRational>| -> Option<IntPoly> {
            p.into_iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
        };
        match (back(n), back(d)) {
            (Some(mut numer), Some(mut denom)) => {
                trim(&mut numer);
                trim(&mut denom);
                Ok(ZetaFn { numer, denom })
            }
            _ => Err(ZetaError::NotNormalized),
        }
    }

    pub fn numer(&self) -> &[BigInt] {
        &self.numer
    }

    pub fn denom(&self) -> &[BigInt] {
        &self.denom
    }

    /// deg numer + deg denom.
    pub fn total_degree(&self) -> usize {
        self.numer.len() + self.denom.len() - 2
    }

    /// Power series coefficients c_0..c_len-1 of numer/denom.
    pub fn series(&self, len: usize) -> Vec<BigInt> {
        let mut c = Vec::with_capacity(len);
        for j in 0..len {
            let mut v = self.numer.get(j).cloned().unwrap_or_default();
            for i in 1..self.denom.len().min(j + 1) {
                v -= &self.denom[i] * &c[j - i];
            }
            c.push(v);
        }
        c
    }
}

impl fmt::Display for ZetaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", format_poly(&self.numer), format_poly(&self.denom))
    }
}

fn trim(p: &mut IntPoly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Ascending-power rendering such as `1 - 5*T + T^2`.
pub fn format_poly(p: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let var = match i {
            0 => String::new(),
            1 => "T".to_string(),
            _ => format!("T^{i}"),
        };
        if i == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&var);
        } else {
            out.push_str(&format!("{mag}*{var}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Z(F, T) mod T^{L+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPrefix {
    pub coeffs: Vec<BigInt>,
}

fn check_contiguous(counts: &[CountRecord]) -> Result<(), ZetaError> {
    for (i, r) in counts.iter().enumerate() {
        if r.k as usize != i + 1 {
            return Err(ZetaError::NonContiguous {
                position: i,
                found: r.k,
            });
        }
    }
    Ok(())
}

/// Exponentiates the log series: j c_j = Σ_{i=1}^{j} N_i c_{j-i}.
pub fn series_from_counts(counts: &[CountRecord]) -> Result<SeriesPrefix, ZetaError> {
    check_contiguous(counts)?;
    let n: Vec<BigInt> = counts.iter().map(|r| BigInt::from(r.count.clone())).collect();
    let mut c = vec![BigInt::one()];
    for j in 1..=n.len() {
        let mut s = BigInt::zero();
        for i in 1..=j {
            s += &n[i - 1] * &c[j - i];
        }
        let (quot, rem) = s.div_rem(&BigInt::from(j));
        if !rem.is_zero() {
            return Err(ZetaError::NonIntegralSeries { j });
        }
        if quot.is_negative() {
            return Err(ZetaError::NegativeSeries { j });
        }
        c.push(quot);
    }
    Ok(SeriesPrefix { coeffs: c })
}

/// Power sums s_k of the reciprocal roots of 1 + a_1 T + ... by Newton's
/// identities: s_k = -k a_k - Σ_{i=1}^{k-1} a_i s_{k-i}.
fn power_sums(a: &[BigInt], k_max: usize) -> Vec<BigInt> {
    let coeff = |i: usize| a.get(i).cloned().unwrap_or_default();
    let mut s: Vec<BigInt> = vec![BigInt::zero()];
    for k in 1..=k_max {
        let mut v = -BigInt::from(k) * coeff(k);
        for i in 1..k {
            v -= coeff(i) * &s[k - i];
        }
        s.push(v);
    }
    s
}

/// N_k = s_k(denom) - s_k(numer) for k = 1..=k_max.
pub fn counts_from_zeta(z: &ZetaFn, k_max: u32) -> Result<Vec<CountRecord>, ZetaError> {
    let sd = power_sums(&z.denom, k_max as usize);
    let sn = power_sums(&z.numer, k_max as usize);
    (1..=k_max)
        .map(|k| {
            let v = &sd[k as usize] - &sn[k as usize];
            v.to_biguint()
                .map(|count| CountRecord { k, count })
                .ok_or(ZetaError::NegativeCount { k })
        })
        .collect()
}

/// Padé-style fit of Z from at least 2D+2 counts: the first (a, b) in order
/// of increasing a+b <= D whose denominator annihilates the series from
/// T^{a+1} through T^{2D} and also through every supplied held-out term.
pub fn rational_reconstruct(counts: &[CountRecord], budget: u32) -> Result<ZetaFn, ZetaError> {
    let need = 2 * budget as usize + 2;
    if counts.len() < need {
        return Err(ZetaError::InsufficientCounts {
            have: counts.len(),
            need,
            budget,
        });
    }
    let series = series_from_counts(counts)?;
    let c: Vec<BigRational> = series.coeffs.iter().map(|v| BigRational::from(v.clone())).collect();
    let fit_end = 2 * budget as usize;
    let last = counts.len();
    let at = |j: isize| -> BigRational {
        if j < 0 {
            BigRational::zero()
        } else {
            c[j as usize].clone()
        }
    };
    for total in 0..=budget as usize {
        for b in 0..=total {
            let a = total - b;
            // rows j = a+1..=fit_end: Σ_{i=1}^{b} q_i c_{j-i} = -c_j
            let rows: Vec<(Vec<BigRational>, BigRational)> = (a + 1..=fit_end)
                .map(|j| {
                    (
                        (1..=b).map(|i| at(j as isize - i as isize)).collect(),
                        -at(j as isize),
                    )
                })
                .collect();
            let Some(qs) = ratpoly::solve(rows, b) else {
                continue;
            };
            let mut q = vec![BigRational::one()];
            q.extend(qs);
            // held-out terms
            let annihilates = (fit_end + 1..=last).all(|j| {
                let mut s = at(j as isize);
                for (i, qi) in q.iter().enumerate().skip(1) {
                    s += qi * at(j as isize - i as isize);
                }
                s.is_zero()
            });
            if !annihilates {
                continue;
            }
            let p: Vec<BigRational> = (0..=a)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for (i, qi) in q.iter().enumerate().take(j + 1) {
                        s += qi * &c[j - i];
                    }
                    s
                })
                .collect();
            let (p, q) = ratpoly::reduce(&p, &q);
            let ints = |v: Vec<BigRational>| -> Option<IntPoly> {
                v.into_iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
            };
            let (Some(mut numer), Some(mut denom)) = (ints(p), ints(q)) else {
                continue;
            };
            trim(&mut numer);
            trim(&mut denom);
            let z = ZetaFn { numer, denom };
            match counts_from_zeta(&z, last as u32) {
                Ok(back) if back == counts => return Ok(z),
                _ => continue,
            }
        }
    }
    Err(ZetaError::NoFit { budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(v: &[u64]) -> Vec<CountRecord> {
        v.iter()
            .enumerate()
            .map(|(i, &c)| CountRecord {
                k: i as u32 + 1,
                count: BigUint::from(c),
            })
            .collect()
    }

    fn ints(v: &[i64]) -> IntPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn z(n: &[i64], d: &[i64]) -> ZetaFn {
        ZetaFn::new(ints(n), ints(d)).unwrap()
    }

    #[test]
    fn bombieri_examples() {
        assert_eq!(bombieri_bound(1, 1), BigUint::from(729u32));
        assert_eq!(bombieri_bound(2, 2), BigUint::from(371293u32));
        assert_eq!(bombieri_bound(1, 0), BigUint::from(125u32));
    }

    #[test]
    fn series_examples() {
        let s = series_from_counts(&records(&[3, 9, 27, 81])).unwrap();
        assert_eq!(s.coeffs, ints(&[1, 3, 9, 27, 81]));
        let s = series_from_counts(&records(&[1, 1, 1])).unwrap();
        assert_eq!(s.coeffs, ints(&[1, 1, 1, 1]));
        let s = series_from_counts(&records(&[0, 0, 0])).unwrap();
        assert_eq!(s.coeffs, ints(&[1, 0, 0, 0]));
        assert!(matches!(
            series_from_counts(&records(&[1, 0])),
            Err(ZetaError::NonIntegralSeries { j: 2 })
        ));
        let mut bad = records(&[1, 1]);
        bad[1].k = 3;
        assert!(matches!(series_from_counts(&bad), Err(ZetaError::NonContiguous { .. })));
    }

    #[test]
    fn reconstruction_examples() {
        let line: Vec<u64> = (1..=6).map(|k| 5u64.pow(k)).collect();
        assert_eq!(rational_reconstruct(&records(&line), 2).unwrap(), z(&[1], &[1, -5]));
        let torus: Vec<u64> = (1..=6).map(|k| 5u64.pow(k) - 1).collect();
        assert_eq!(rational_reconstruct(&records(&torus), 2).unwrap(), z(&[1, -1], &[1, -5]));
        let three: Vec<u64> = (1..=6).map(|k| 3u64.pow(k)).collect();
        assert_eq!(rational_reconstruct(&records(&three), 2).unwrap(), z(&[1], &[1, -3]));
        assert!(matches!(
            rational_reconstruct(&records(&line[..5]), 2),
            Err(ZetaError::InsufficientCounts { .. })
        ));
    }

    #[test]
    fn budget_too_small() {
        // elliptic-curve-like numerator of degree 2 over denominator of
        // degree 2: (1 - aT + qT^2) / ((1-T)(1-qT)) with q = 5, a = 2
        let zf = z(&[1, -2, 5], &[1, -6, 5]);
        let counts = counts_from_zeta(&zf, 10).unwrap();
        assert!(matches!(rational_reconstruct(&counts[..6], 2), Err(ZetaError::NoFit { .. })));
        assert_eq!(rational_reconstruct(&counts, 4).unwrap(), zf);
    }

    #[test]
    fn counts_from_closed_forms() {
        let c = counts_from_zeta(&z(&[1], &[1, -7]), 4).unwrap();
        assert_eq!(c, records(&[7, 49, 343, 2401]));
        assert_eq!(counts_from_zeta(&z(&[1], &[1]), 3).unwrap(), records(&[0, 0, 0]));
        let c = counts_from_zeta(&z(&[1, -1], &[1, -5]), 3).unwrap();
        assert_eq!(c, records(&[4, 24, 124]));
        assert!(matches!(
            counts_from_zeta(&z(&[1, -3], &[1]), 1),
            Err(ZetaError::NegativeCount { k: 1 })
        ));
    }

    #[test]
    fn normalization() {
        // (1 - T)(1 - 2T) / (1 - T)  ->  1 - 2T
        let r = z(&[1, -3, 2], &[1, -1]);
        assert_eq!(r, z(&[1, -2], &[1]));
        assert!(ZetaFn::new(ints(&[2]), ints(&[1])).is_err());
        assert_eq!(format_poly(&ints(&[1, -5])), "1 - 5*T");
        assert_eq!(format_poly(&ints(&[1, 0, 1, -2])), "1 + T^2 - 2*T^3");
        assert_eq!(z(&[1, -1], &[1, -5]).series(4), ints(&[1, 4, 20, 100]));
    }
}
