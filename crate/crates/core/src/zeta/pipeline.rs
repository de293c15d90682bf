//! Zeta function of a system: counts, possibly through a Kronecker
//! reduction, followed by adaptive reconstruction.
//!
//! With T = (n+1) d^n: if q > T the system is reduced once over F_q and the
//! reduced system is counted over every F_{q^k}.  Otherwise each k is
//! handled separately: exhaustively while q^k <= T, and beyond that by
//! reducing the system read over F_{q^k} and counting the result there.

use num_bigint::BigUint;

use super::{bombieri_bound, rational_reconstruct, ZetaError, ZetaFn};
use crate::count::{count_points, CountError, CountRecord, Limits, PolySystem};
use crate::ff::FieldCtx;
use crate::kronecker::{affine_threshold, reduce_affine, KroneckerError, ReductionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaConfig {
    pub limits: Limits,
    /// Largest degree budget D tried; D starts at 2 and doubles.
    pub max_budget: u32,
    /// Largest k for which a count may be requested.
    pub k_max: u32,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig {
            limits: Limits::default(),
            max_budget: 16,
            k_max: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Counted the system reduced once over the base field.
    Reduced,
    /// Counted the original system directly.
    Exhaustive,
    /// Counted the system reduced over F_{q^k}.
    ExtensionReduced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KProvenance {
    pub k: u32,
    pub branch: Branch,
    /// Elimination steps behind the counted system.
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct ZetaReport {
    pub zeta: ZetaFn,
    pub counts: Vec<CountRecord>,
    pub provenance: Vec<KProvenance>,
    /// Reductions performed, tagged with the k they serve (`None` for the
    /// single base-field reduction).
    pub reductions: Vec<(Option<u32>, ReductionReport)>,
    /// Budget D at which reconstruction and validation succeeded.
    pub budget: u32,
    pub bombieri: BigUint,
    pub threshold: BigUint,
}

/// Why no zeta function was produced, with everything computed so far.
#[derive(Debug, Clone, thiserror::Error)]
#[error("no zeta function within limits (last budget tried {attempted_budget}): {reason}")]
pub struct Incomplete {
    pub counts: Vec<CountRecord>,
    pub provenance: Vec<KProvenance>,
    pub attempted_budget: u32,
    pub reason: String,
    /// True when an enumeration or field-size cap stopped the run.
    pub cap_hit: bool,
}

enum Plan {
    Reduced(PolySystem),
    PerK,
}

struct Counter<'a> {
    f: &'a PolySystem,
    cfg: &'a ZetaConfig,
    plan: Plan,
    threshold: BigUint,
    counts: Vec<CountRecord>,
    provenance: Vec<KProvenance>,
    reductions: Vec<(Option<u32>, ReductionReport)>,
    base_steps: usize,
}

enum Stop {
    Cap(String),
    Other(String),
}

impl From<CountError> for Stop {
    fn from(e: CountError) -> Self {
        match e {
            CountError::CapExceeded { .. } | CountError::Field(crate::ff::FieldError::TooLarge { .. }) => {
                Stop::Cap(e.to_string())
            }
            other => Stop::Other(other.to_string()),
        }
    }
}

impl From<KroneckerError> for Stop {
    fn from(e: KroneckerError) -> Self {
        Stop::Other(e.to_string())
    }
}

impl Counter<'_> {
    fn count_next(&mut self) -> Result<(), Stop> {
        let k = self.counts.len() as u32 + 1;
        if k > self.cfg.k_max {
            return Err(Stop::Cap(format!("count for k = {k} is beyond k_max = {}", self.cfg.k_max)));
        }
        let lim = &self.cfg.limits;
        let (count, branch, steps) = match &self.plan {
            Plan::Reduced(g) => (count_points(g, k, lim)?, Branch::Reduced, self.base_steps),
            Plan::PerK => {
                let q = self.f.ctx().size();
                let qk = BigUint::from(q).pow(k);
                if qk <= self.threshold {
                    (count_points(self.f, k, lim)?, Branch::Exhaustive, 0)
                } else {
                    let base = self.f.ctx();
                    let ext = FieldCtx::with_cap(base.p() as u64, base.k() * k, lim.max_field)
                        .map_err(CountError::from)?;
                    let fk = self.f.embed_into(&ext).map_err(CountError::from)?;
                    let report = reduce_affine(&ext, fk.nvars(), fk.polys())?;
                    let gk = PolySystem::new(&ext, fk.nvars(), report.output.clone())
                        .expect("reduction keeps the shape");
                    let steps = report.witnesses.len();
                    self.reductions.push((Some(k), report));
                    (count_points(&gk, 1, lim)?, Branch::ExtensionReduced, steps)
                }
            }
        };
        self.counts.push(CountRecord { k, count });
        self.provenance.push(KProvenance { k, branch, steps });
        Ok(())
    }
}

/// Z(F, T) with the branch structure described in the module docs and the
/// adaptive budget D = 2, 4, 8, ... up to `cfg.max_budget`.
pub fn zeta_main(f: &PolySystem, cfg: &ZetaConfig) -> Result<ZetaReport, Incomplete> {
    let n = f.nvars();
    let d = f.degree();
    let threshold = affine_threshold(n, d);
    let q = BigUint::from(f.ctx().size());
    let mut counter = Counter {
        f,
        cfg,
        plan: Plan::PerK,
        threshold: threshold.clone(),
        counts: Vec::new(),
        provenance: Vec::new(),
        reductions: Vec::new(),
        base_steps: 0,
    };
    let incomplete = |c: Counter, budget: u32, stop: Stop| {
        let (reason, cap_hit) = match stop {
            Stop::Cap(r) => (r, true),
            Stop::Other(r) => (r, false),
        };
        Incomplete {
            counts: c.counts,
            provenance: c.provenance,
            attempted_budget: budget,
            reason,
            cap_hit,
        }
    };
    if q > threshold {
        match reduce_affine(f.ctx(), n, f.polys()) {
            Ok(report) => {
                let g = PolySystem::new(f.ctx(), n, report.output.clone()).expect("reduction keeps the shape");
                counter.base_steps = report.witnesses.len();
                counter.reductions.push((None, report));
                counter.plan = Plan::Reduced(g);
            }
            Err(e) => return Err(incomplete(counter, 0, e.into())),
        }
    }
    let mut budget = 2u32;
    loop {
        let need = 2 * budget as usize + 2;
        while counter.counts.len() < need {
            if let Err(stop) = counter.count_next() {
                return Err(incomplete(counter, budget, stop));
            }
        }
        match rational_reconstruct(&counter.counts, budget) {
            Ok(zeta) => {
                return Ok(ZetaReport {
                    zeta,
                    counts: counter.counts,
                    provenance: counter.provenance,
                    reductions: counter.reductions,
                    budget,
                    bombieri: bombieri_bound(n as u32, d),
                    threshold,
                })
            }
            Err(ZetaError::NoFit { .. }) if budget * 2 <= cfg.max_budget => budget *= 2,
            Err(e) => {
                let stop = match e {
                    ZetaError::NoFit { .. } => {
                        Stop::Cap(format!("{e}; budget cap is {}", cfg.max_budget))
                    }
                    other => Stop::Other(other.to_string()),
                };
                return Err(incomplete(counter, budget, stop));
            }
        }
    }
}
