//! Output records of the subcommands.  Big integers, rationals and field
//! elements are written as strings so that JSON output is exact.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bench::{BenchParams, BenchRow};
use crate::count::{CountRecord, PolySystem};
use crate::ff::{FieldCtx, FieldElement};
use crate::kronecker::{affine_threshold, ReductionReport};
use crate::mpoly::default_names;
use crate::progequiv::{EquivQuery, Verdict};
use crate::zeta::{format_poly, Branch, Incomplete, KProvenance, ZetaReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub p: u32,
    pub k: u32,
}

impl From<&FieldCtx> for Field {
    fn from(c: &FieldCtx) -> Self {
        Field { p: c.p(), k: c.k() }
    }
}

fn elems(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOut {
    pub field: Field,
    pub nvars: usize,
    pub k: u32,
    pub method: String,
    pub count: String,
}

impl CountOut {
    pub fn human(&self) -> String {
        format!("{}\n", self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOut {
    pub m: u32,
    pub dependency: String,
    pub point: Vec<String>,
    pub leading_coefficient: String,
    pub identity_holds: bool,
    pub leading_coefficient_holds: bool,
    pub transform_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KroneckerOut {
    pub field: Field,
    pub nvars: usize,
    pub threshold: String,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub steps: Vec<StepOut>,
}

impl KroneckerOut {
    pub fn new(f: &PolySystem, r: &ReductionReport) -> Self {
        let names = default_names(r.nvars);
        KroneckerOut {
            field: (&r.field).into(),
            nvars: r.nvars,
            threshold: affine_threshold(r.nvars, f.degree()).to_string(),
            input: r.input.iter().map(|p| p.display_with(&names)).collect(),
            output: r.output.iter().map(|p| p.display_with(&names)).collect(),
            steps: r
                .witnesses
                .iter()
                .map(|w| {
                    let ynames: Vec<String> = (1..=w.a.nvars()).map(|i| format!("y{i}")).collect();
                    StepOut {
                        m: w.m,
                        dependency: w.a.display_with(&ynames),
                        point: elems(&w.b),
                        leading_coefficient: w.c.to_string(),
                        identity_holds: w.identity_holds(),
                        leading_coefficient_holds: w.leading_coefficient_holds(),
                        transform_holds: w.transform_holds(),
                    }
                })
                .collect(),
        }
    }

    /// The reduced system in system-file form, preceded by comment lines.
    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} -> {} polynomials, {} elimination steps", self.input.len(), self.output.len(), self.steps.len());
        for (i, st) in self.steps.iter().enumerate() {
            let ok = st.identity_holds && st.leading_coefficient_holds && st.transform_holds;
            let _ = writeln!(
                s,
                "# step {}: dependency of degree {}, point ({}), checks {}",
                i + 1,
                st.m,
                st.point.join(", "),
                if ok { "passed" } else { "FAILED" }
            );
        }
        let _ = writeln!(s, "{} {} {}", self.field.p, self.field.k, self.nvars);
        for p in &self.output {
            let _ = writeln!(s, "{p}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCount {
    pub k: u32,
    pub count: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KProv {
    pub k: u32,
    pub branch: Branch,
    pub steps: usize,
}

fn kcounts(c: &[CountRecord]) -> Vec<KCount> {
    c.iter()
        .map(|r| KCount {
            k: r.k,
            count: r.count.to_string(),
        })
        .collect()
}

fn kprov(p: &[KProvenance]) -> Vec<KProv> {
    p.iter()
        .map(|r| KProv {
            k: r.k,
            branch: r.branch,
            steps: r.steps,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ZetaOut {
    Complete {
        field: Field,
        nvars: usize,
        numerator: Vec<String>,
        denominator: Vec<String>,
        numerator_text: String,
        denominator_text: String,
        budget: u32,
        bombieri: String,
        threshold: String,
        counts: Vec<KCount>,
        provenance: Vec<KProv>,
    },
    Incomplete {
        field: Field,
        nvars: usize,
        attempted_budget: u32,
        reason: String,
        cap_hit: bool,
        counts: Vec<KCount>,
        provenance: Vec<KProv>,
    },
}

impl ZetaOut {
    pub fn complete(f: &PolySystem, r: &ZetaReport) -> Self {
        let ints = |v: &[num_bigint::BigInt]| v.iter().map(|c| c.to_string()).collect();
        ZetaOut::Complete {
            field: f.ctx().into(),
            nvars: f.nvars(),
            numerator: ints(r.zeta.numer()),
            denominator: ints(r.zeta.denom()),
            numerator_text: format_poly(r.zeta.numer()),
            denominator_text: format_poly(r.zeta.denom()),
            budget: r.budget,
            bombieri: r.bombieri.to_string(),
            threshold: r.threshold.to_string(),
            counts: kcounts(&r.counts),
            provenance: kprov(&r.provenance),
        }
    }

    pub fn incomplete(f: &PolySystem, r: &Incomplete) -> Self {
        ZetaOut::Incomplete {
            field: f.ctx().into(),
            nvars: f.nvars(),
            attempted_budget: r.attempted_budget,
            reason: r.reason.clone(),
            cap_hit: r.cap_hit,
            counts: kcounts(&r.counts),
            provenance: kprov(&r.provenance),
        }
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let table = |s: &mut String, counts: &[KCount], prov: &[KProv]| {
            for (c, p) in counts.iter().zip(prov) {
                let b = serde_json::to_string(&p.branch).unwrap_or_default();
                let _ = writeln!(s, "  k = {}: {} ({})", c.k, c.count, b.trim_matches('"'));
            }
        };
        match self {
            ZetaOut::Complete {
                numerator_text,
                denominator_text,
                budget,
                bombieri,
                counts,
                provenance,
                ..
            } => {
                let _ = writeln!(s, "numerator: {numerator_text}");
                let _ = writeln!(s, "denominator: {denominator_text}");
                let _ = writeln!(s, "budget: {budget} (degree bound {bombieri})");
                let _ = writeln!(s, "counts:");
                table(&mut s, counts, provenance);
            }
            ZetaOut::Incomplete {
                attempted_budget,
                reason,
                counts,
                provenance,
                ..
            } => {
                let _ = writeln!(s, "no zeta function: {reason}");
                let _ = writeln!(s, "last budget tried: {attempted_budget}");
                let _ = writeln!(s, "counts:");
                table(&mut s, counts, provenance);
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryText {
    pub p1: String,
    pub p2: String,
    pub q1: String,
    pub q2: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum VerdictOut {
    EquivalentUpTo {
        k_max: u32,
    },
    Inequivalent {
        k: u32,
        input: Vec<String>,
        output: Vec<String>,
        /// `None` when the left side has no surviving assignment.
        p_left: Option<String>,
        p_right: Option<String>,
    },
    CapsExceeded {
        k: u32,
        reason: String,
    },
}

impl From<&Verdict> for VerdictOut {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::EquivalentUpTo { k_max } => VerdictOut::EquivalentUpTo { k_max: *k_max },
            Verdict::Inequivalent(w) => VerdictOut::Inequivalent {
                k: w.k,
                input: elems(&w.input),
                output: elems(&w.output),
                p_left: w.p_left.as_ref().map(|p| p.to_string()),
                p_right: w.p_right.as_ref().map(|p| p.to_string()),
            },
            Verdict::CapsExceeded { k, reason } => VerdictOut::CapsExceeded {
                k: *k,
                reason: reason.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivOut {
    pub field: Field,
    pub inputs: Vec<String>,
    pub randoms: Vec<String>,
    /// The arithmetic query that was checked, when reduction was requested.
    pub reduced: Option<QueryText>,
    #[serde(flatten)]
    pub verdict: VerdictOut,
}

impl EquivOut {
    pub fn new(q: &EquivQuery, checked: &EquivQuery, reduced: bool, v: &Verdict) -> Self {
        EquivOut {
            field: q.ctx().into(),
            inputs: checked.inputs().to_vec(),
            randoms: checked.randoms().to_vec(),
            reduced: reduced.then(|| QueryText {
                p1: checked.p1.to_string(),
                p2: checked.p2.to_string(),
                q1: checked.q1.to_string(),
                q2: checked.q2.to_string(),
            }),
            verdict: v.into(),
        }
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        if let Some(r) = &self.reduced {
            let _ = writeln!(s, "reduced query over randoms {}:", self.randoms.join(", "));
            for (k, v) in [("P1", &r.p1), ("P2", &r.p2), ("Q1", &r.q1), ("Q2", &r.q2)] {
                let _ = writeln!(s, "  {k}: {v}");
            }
        }
        let prob = |p: &Option<String>| p.clone().unwrap_or_else(|| "vacuous".into());
        match &self.verdict {
            VerdictOut::EquivalentUpTo { k_max } => {
                let _ = writeln!(s, "equivalent over F_{}^k for k = 1..{k_max}", self.field_size());
            }
            VerdictOut::Inequivalent {
                k,
                input,
                output,
                p_left,
                p_right,
            } => {
                let _ = writeln!(s, "inequivalent at k = {k}");
                let assigned: Vec<String> = self.inputs.iter().zip(input).map(|(n, v)| format!("{n} = {v}")).collect();
                let _ = writeln!(s, "  input: {}", if assigned.is_empty() { "(none)".into() } else { assigned.join(", ") });
                let _ = writeln!(s, "  output: ({})", output.join(", "));
                let _ = writeln!(s, "  P1 | P2: {}", prob(p_left));
                let _ = writeln!(s, "  Q1 | Q2: {}", prob(p_right));
            }
            VerdictOut::CapsExceeded { k, reason } => {
                let _ = writeln!(s, "undecided at k = {k}: {reason}");
            }
        }
        s
    }

    fn field_size(&self) -> String {
        if self.field.k == 1 {
            self.field.p.to_string()
        } else {
            format!("{}^{}", self.field.p, self.field.k)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRowOut {
    pub m: usize,
    pub reduced_seconds: f64,
    pub inclusion_exclusion_seconds: f64,
    pub count_reduced: String,
    pub count_ie: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOut {
    pub params: BenchParams,
    pub rows: Vec<BenchRowOut>,
    /// Log-log slope of the reduced-path time against m.
    pub reduced_loglog_slope: f64,
}

impl BenchOut {
    pub fn new(params: &BenchParams, rows: &[BenchRow]) -> Self {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.reduced.as_secs_f64())).collect();
        BenchOut {
            params: *params,
            rows: rows
                .iter()
                .map(|r| BenchRowOut {
                    m: r.m,
                    reduced_seconds: r.reduced.as_secs_f64(),
                    inclusion_exclusion_seconds: r.inclusion_exclusion.as_secs_f64(),
                    count_reduced: r.count_reduced.to_string(),
                    count_ie: r.count_ie.to_string(),
                })
                .collect(),
            reduced_loglog_slope: if pts.len() >= 2 { crate::bench::loglog_slope(&pts) } else { 0.0 },
        }
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>4} {:>14} {:>14} {:>8}", "m", "reduced (s)", "incl-excl (s)", "count");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>4} {:>14.6} {:>14.6} {:>8}",
                r.m, r.reduced_seconds, r.inclusion_exclusion_seconds, r.count_reduced
            );
        }
        let _ = writeln!(s, "reduced path log-log slope: {:.3}", self.reduced_loglog_slope);
        s
    }
}
