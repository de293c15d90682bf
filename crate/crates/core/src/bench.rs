//! Timing of Kronecker-reduced counting against inclusion-exclusion as the
//! number of equations grows.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::count::{count_points, count_points_ie, CountError, Limits, PolySystem};
use crate::ff::{FieldCtx, FieldError};
use crate::kronecker::{reduce_affine, KroneckerError};
use crate::mpoly::{monomials_of_degree, MPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BenchParams {
    pub n: usize,
    pub d: u32,
    pub q: u64,
    pub m_from: usize,
    pub m_to: usize,
    pub m_step: usize,
    pub seed: u64,
    /// Timed batches per m; the fastest is reported.
    pub reps: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            n: 2,
            d: 2,
            q: 13,
            m_from: 4,
            m_to: 16,
            m_step: 2,
            seed: 1,
            reps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    /// `reduce_affine` followed by counting the reduced system.
    pub reduced: Duration,
    /// `count_points_ie` on the original system.
    pub inclusion_exclusion: Duration,
    pub count_reduced: BigUint,
    pub count_ie: BigUint,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("bad parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Kronecker(#[from] KroneckerError),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// m random polynomials of degree d in n variables over `ctx`, all
/// vanishing at one random point.
pub fn planted_system(ctx: &FieldCtx, n: usize, d: u32, m: usize, rng: &mut impl Rng) -> PolySystem {
    let q = ctx.size();
    let point: Vec<_> = (0..n).map(|_| ctx.from_u64(rng.gen_range(0..q))).collect();
    let monos: Vec<_> = (0..=d).flat_map(|e| monomials_of_degree(n, e)).collect();
    let polys = (0..m)
        .map(|_| loop {
            let terms = monos.iter().map(|mo| (mo.exps().to_vec(), ctx.from_u64(rng.gen_range(0..q))));
            let f = MPoly::from_terms(ctx, n, terms).expect("shape");
            if f.degree() != Some(d) {
                continue;
            }
            let shift = MPoly::constant(ctx, n, f.eval(&point).expect("shape"));
            break &f - &shift;
        })
        .collect();
    PolySystem::new(ctx, n, polys).expect("shape")
}

/// Calls shorter than this are timed in batches.
const MIN_BATCH: Duration = Duration::from_millis(20);

/// Per-call time, the fastest of `reps` batches; a batch repeats `f`
/// enough times to last about `MIN_BATCH`.
fn fastest<T>(reps: usize, mut f: impl FnMut() -> Result<T, BenchError>) -> Result<(Duration, T), BenchError> {
    let t0 = Instant::now();
    let value = f()?;
    let first = t0.elapsed();
    let batch = (MIN_BATCH.as_secs_f64() / first.as_secs_f64().max(1e-9)).ceil().max(1.0) as u32;
    let mut best = first;
    for _ in 0..reps.max(1) {
        let t0 = Instant::now();
        for _ in 0..batch {
            f()?;
        }
        best = best.min(t0.elapsed() / batch);
    }
    Ok((best, value))
}

/// Both timings for m = m_from, m_from + m_step, ..., m_to; the systems
/// for different m are independent draws from one seeded stream.
pub fn bench_m(params: &BenchParams, limits: &Limits) -> Result<Vec<BenchRow>, BenchError> {
    if params.m_step == 0 || params.m_from > params.m_to {
        return Err(BenchError::Params("need m_step > 0 and m_from <= m_to".into()));
    }
    let ctx = FieldCtx::prime(params.q)?;
    let limits = Limits {
        max_ie_polys: limits.max_ie_polys.max(params.m_to),
        ..*limits
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut rows = Vec::new();
    for m in (params.m_from..=params.m_to).step_by(params.m_step) {
        let f = planted_system(&ctx, params.n, params.d, m, &mut rng);
        let (reduced, count_reduced) = fastest(params.reps, || {
            let r = reduce_affine(&ctx, f.nvars(), f.polys())?;
            let g = PolySystem::new(&ctx, f.nvars(), r.output).expect("reduction keeps the shape");
            Ok(count_points(&g, 1, &limits)?)
        })?;
        let (inclusion_exclusion, count_ie) = fastest(params.reps, || Ok(count_points_ie(&f, 1, &limits)?))?;
        rows.push(BenchRow {
            m,
            reduced,
            inclusion_exclusion,
            count_reduced,
            count_ie,
        });
    }
    Ok(rows)
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.max(1e-12).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_point_is_a_zero() {
        let ctx = FieldCtx::prime(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = planted_system(&ctx, 2, 2, 5, &mut rng);
        assert_eq!(f.polys().len(), 5);
        assert!(f.polys().iter().all(|p| p.degree() == Some(2)));
        assert!(count_points(&f, 1, &Limits::default()).unwrap() >= BigUint::from(1u32));
    }

    #[test]
    fn paths_agree_on_small_m() {
        let p = BenchParams {
            m_from: 4,
            m_to: 6,
            reps: 1,
            ..BenchParams::default()
        };
        let rows = bench_m(&p, &Limits::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![4, 6]);
        for r in rows {
            assert_eq!(r.count_reduced, r.count_ie);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, (x * x) as f64 * 3.0)).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-9);
    }
}
