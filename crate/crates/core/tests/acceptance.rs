//! End-to-end acceptance checks, run without the test harness so every
//! check prints one PASS or FAIL line; exits nonzero if any check fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kronzeta::bench::{bench_m, loglog_slope, planted_system, BenchParams};
use kronzeta::cli::files::{load_query, parse_program_file};
use kronzeta::cli::output::{BenchOut, CountOut, EquivOut, KroneckerOut, ZetaOut};
use kronzeta::count::{count_points, count_points_ie, solutions, CountRecord, Limits, PolySystem};
use kronzeta::ff::{FieldCtx, FieldElement};
use kronzeta::kronecker::{reduce_affine, DependencyWitness};
use kronzeta::progequiv::{
    distribution, equivalent_at, reduce_query, universal_equivalence, ArithProgram, Distribution, EquivLimits,
    Verdict,
};
use kronzeta::zeta::{counts_from_zeta, rational_reconstruct, zeta_main, Branch, ZetaConfig, ZetaReport};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn system(text: &str) -> PolySystem {
    text.parse().unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn kronecker_systems() -> Vec<PolySystem> {
    let ctx = FieldCtx::prime(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..100)
        .map(|i| {
            let m = rng.gen_range(4..=8);
            if i % 2 == 0 {
                planted_system(&ctx, 2, 2, m, &mut rng)
            } else {
                common::redundant_system(&ctx, 2, 2, m, &mut rng)
            }
        })
        .collect()
}

fn solution_set(f: &PolySystem, k: u32) -> Vec<Vec<u32>> {
    let mut s: Vec<Vec<u32>> = solutions(f, k, &Limits::default())
        .unwrap()
        .iter()
        .map(|p| p.iter().map(FieldElement::code).collect())
        .collect();
    s.sort();
    s
}

fn kronecker_sets(systems: &[PolySystem], witnesses: &mut Vec<DependencyWitness>) -> Outcome {
    let mut points = 0usize;
    for (i, f) in systems.iter().enumerate() {
        let r = reduce_affine(f.ctx(), 2, f.polys()).map_err(|e| format!("system {i}: {e}"))?;
        ensure!(r.output.len() == 3, "system {i}: {} output polynomials", r.output.len());
        ensure!(
            r.output.iter().all(|g| g.degree_or_zero() <= 2),
            "system {i}: output degree above 2"
        );
        let g = PolySystem::new(f.ctx(), 2, r.output.clone()).unwrap();
        for k in 1..=2 {
            let ext = FieldCtx::new(13, k).unwrap();
            let a = common::zero_set(f, &ext);
            let b = common::zero_set(&g, &ext);
            ensure!(a == b, "system {i}: zero sets differ over F_13^{k}");
            points += a.len();
        }
        let a = solution_set(f, 3);
        ensure!(a == solution_set(&g, 3), "system {i}: zero sets differ over F_13^3");
        points += a.len();
        witnesses.extend(r.witnesses);
    }
    Ok(format!("{} systems, {points} zeros compared", systems.len()))
}

/// Evaluates A(f(z)) at every z in F_13^3; A(f) has degree M d = 8 < 13 in
/// each variable, so vanishing everywhere means it is the zero polynomial.
fn dependency_identity(witnesses: &[DependencyWitness]) -> Outcome {
    ensure!(!witnesses.is_empty(), "no reduction steps were recorded");
    let ctx = FieldCtx::prime(13).unwrap();
    let elems: Vec<FieldElement> = ctx.elements().collect();
    for (i, w) in witnesses.iter().enumerate() {
        ensure!(w.a.is_homogeneous() && w.a.degree() == Some(w.m), "step {i}: A is not a form of degree {}", w.m);
        for x in &elems {
            for y in &elems {
                for z in &elems {
                    let v: Vec<FieldElement> = w.inputs.iter().map(|f| f.eval(&[*x, *y, *z]).unwrap()).collect();
                    ensure!(w.a.eval(&v).unwrap().is_zero(), "step {i}: A(f) is nonzero at a point");
                }
            }
        }
        let c = w.a.eval(&w.b).unwrap();
        ensure!(!c.is_zero() && c == w.c, "step {i}: A(b) = {c:?}");
        ensure!(w.identity_holds(), "step {i}: expanded substitution is nonzero");
        ensure!(w.leading_coefficient_holds() && w.transform_holds(), "step {i}: witness checks fail");
    }
    Ok(format!("{} steps", witnesses.len()))
}

fn zeta_of(text: &str) -> Result<ZetaReport, String> {
    zeta_main(&system(text), &ZetaConfig::default()).map_err(|e| e.reason)
}

fn zeta_closed_forms(reports: &mut Vec<ZetaReport>) -> Outcome {
    let cases: [(&str, &str, Vec<i64>, Vec<i64>); 6] = [
        ("x^2 - y over F_3", "3 1 2\nx1^2 - x2", vec![1], vec![1, -3]),
        ("x^2 - y over F_5", "5 1 2\nx1^2 - x2", vec![1], vec![1, -5]),
        ("xy - 1 over F_5", "5 1 2\nx1*x2 - 1", vec![1, -1], vec![1, -5]),
        ("(x1, x2) over F_3", "3 1 2\nx1\nx2", vec![1], vec![1, -1]),
        ("(x1, x2) over F_5", "5 1 2\nx1\nx2", vec![1], vec![1, -1]),
        ("(1) over F_5", "5 1 2\n1", vec![1], vec![1]),
    ];
    for (name, text, num, den) in cases {
        let r = zeta_of(text)?;
        ensure!(
            r.zeta.numer() == &ints(&num)[..] && r.zeta.denom() == &ints(&den)[..],
            "{name}: got {:?} / {:?}",
            r.zeta.numer(),
            r.zeta.denom()
        );
        reports.push(r);
    }
    Ok("6 systems".into())
}

fn counting_paths() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let fields = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1)];
    let limits = Limits::default();
    let mut nonzero = 0;
    for i in 0..200 {
        let (p, e) = fields[rng.gen_range(0..fields.len())];
        let ctx = FieldCtx::new(p, e).unwrap();
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=4);
        let polys = (0..m)
            .map(|_| {
                let d = rng.gen_range(0..=3);
                common::sparse_poly(&ctx, n, d, 3, &mut rng)
            })
            .collect();
        let f = PolySystem::new(&ctx, n, polys).unwrap();
        let k = rng.gen_range(1..=2);
        let a = count_points(&f, k, &limits).map_err(|e| e.to_string())?;
        let b = count_points_ie(&f, k, &limits).map_err(|e| e.to_string())?;
        let s = solutions(&f, k, &limits).map_err(|e| e.to_string())?.len();
        let oracle = common::zero_set(&f, &FieldCtx::new(p, e * k).unwrap()).len();
        ensure!(
            a == b && a == BigUint::from(s) && s == oracle,
            "system {i} over F_{}^{k}: {a} / {b} / {s} / oracle {oracle}",
            ctx.size()
        );
        nonzero += usize::from(s > 0);
    }
    Ok(format!("200 systems, {nonzero} with zeros"))
}

fn scaling_in_m() -> Outcome {
    let params = BenchParams::default();
    let rows = bench_m(&params, &Limits::default()).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure!(r.count_reduced == r.count_ie, "m = {}: counts differ", r.m);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.reduced.as_secs_f64())).collect();
    let slope = loglog_slope(&pts);
    ensure!(slope <= 3.0, "reduced path grows like m^{slope:.2}");
    let mut ratios = Vec::new();
    for w in rows.windows(2) {
        if w[0].m >= 10 {
            let ratio = w[1].inclusion_exclusion.as_secs_f64() / w[0].inclusion_exclusion.as_secs_f64();
            let per_step = ratio.powf(1.0 / (w[1].m - w[0].m) as f64);
            ensure!(
                per_step >= 1.5,
                "inclusion-exclusion grew {ratio:.2}x from m = {} to {} ({per_step:.2}x per equation)",
                w[0].m,
                w[1].m
            );
            ratios.push(format!("{per_step:.2}"));
        }
    }
    Ok(format!("reduced slope {slope:.2}, inclusion-exclusion per-equation growth {}", ratios.join(" ")))
}

fn small_q_branch(reports: &mut Vec<ZetaReport>) -> Outcome {
    let f2 = FieldCtx::prime(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let file = std::fs::read_to_string(data("redundant_f2.sys")).unwrap();
    let systems = [system(&file), common::redundant_system(&f2, 2, 2, 4, &mut rng)];
    for (i, f) in systems.iter().enumerate() {
        let r = zeta_main(f, &ZetaConfig::default()).map_err(|e| format!("system {i}: {}", e.reason))?;
        for k in 1..=5u32 {
            let oracle = common::zero_set(f, &FieldCtx::new(2, k).unwrap()).len();
            let rec = r.counts.iter().find(|c| c.k == k).ok_or(format!("system {i}: no count for k = {k}"))?;
            ensure!(rec.count == BigUint::from(oracle), "system {i}, k = {k}: {} vs {oracle}", rec.count);
            let prov = r.provenance.iter().find(|p| p.k == k).unwrap();
            let expect = if k <= 3 { Branch::Exhaustive } else { Branch::ExtensionReduced };
            ensure!(prov.branch == expect, "system {i}, k = {k}: branch {:?}", prov.branch);
        }
        reports.push(r);
    }
    Ok("2 systems, k = 1..5".into())
}

fn rational(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Output counts of `f` over all assignments of `nr` random values.
fn enumerate(ctx: &FieldCtx, nr: usize, f: impl Fn(&[FieldElement]) -> Option<Vec<FieldElement>>) -> BTreeMap<Vec<FieldElement>, usize> {
    let elems: Vec<FieldElement> = ctx.elements().collect();
    let mut out = BTreeMap::new();
    let total = elems.len().pow(nr as u32);
    for mut idx in 0..total {
        let mut r = Vec::new();
        for _ in 0..nr {
            r.push(elems[idx % elems.len()]);
            idx /= elems.len();
        }
        if let Some(o) = f(&r) {
            *out.entry(o).or_default() += 1;
        }
    }
    out
}

fn to_dist(counts: BTreeMap<Vec<FieldElement>, usize>) -> Distribution {
    let total: usize = counts.values().sum();
    Distribution::Dist(counts.into_iter().map(|(k, v)| (k, rational(v, total))).collect())
}

fn program_examples() -> Outcome {
    let limits = EquivLimits::default();
    let f5 = FieldCtx::prime(5).unwrap();
    let src = std::fs::read_to_string(data("square_cube.prog")).unwrap();
    let p = parse_program_file(&f5, &src)?;
    let got = distribution(&p, &ArithProgram::empty(&f5), &[], 1, &limits).map_err(|e| e.to_string())?;
    let expect = to_dist(enumerate(&f5, 1, |r| {
        let sq = f5.mul(&r[0], &r[0]);
        Some(vec![sq, f5.mul(&sq, &r[0])])
    }));
    ensure!(got == expect, "square/cube distribution {got:?}");

    let seven = |ctx: &FieldCtx| ctx.from_u64(7);
    let p1 = |ctx: &FieldCtx, x: FieldElement, r: &[FieldElement]| {
        let y = if x.is_zero() { f_add(ctx, r[0], 2) } else { f_add(ctx, r[0], 1) };
        vec![y, ctx.mul(&r[1], &r[1])]
    };
    let q1 = |ctx: &FieldCtx, r: &[FieldElement]| {
        let s = f_add(ctx, r[1], 1);
        vec![r[0], ctx.mul(&seven(ctx), &ctx.mul(&s, &s))]
    };
    let q3 = load_query(&data("squares_f3.query")).map_err(|e| e.to_string())?;
    let f3 = FieldCtx::prime(3).unwrap();
    for x in f3.elements() {
        let a = enumerate(&f3, 2, |r| Some(p1(&f3, x, r)));
        let b = enumerate(&f3, 2, |r| Some(q1(&f3, r)));
        ensure!(a == b, "enumeration finds the q = 3 query inequivalent at x = {x:?}");
    }
    let v = universal_equivalence(&q3, 2, &limits);
    ensure!(v == Verdict::EquivalentUpTo { k_max: 2 }, "q = 3: {v:?}");

    let q5 = load_query(&data("squares_f5.query")).map_err(|e| e.to_string())?;
    let Verdict::Inequivalent(w) = universal_equivalence(&q5, 2, &limits) else {
        return Err("q = 5 query reported equivalent".into());
    };
    ensure!(w.k == 1, "q = 5 witness at k = {}", w.k);
    let x = w.input[0];
    let a = enumerate(&f5, 2, |r| Some(p1(&f5, x, r)));
    let b = enumerate(&f5, 2, |r| Some(q1(&f5, r)));
    let pa = rational(a.get(&w.output).copied().unwrap_or(0), 25);
    let pb = rational(b.get(&w.output).copied().unwrap_or(0), 25);
    ensure!(
        pa != pb && w.p_left == Some(pa.clone()) && w.p_right == Some(pb.clone()),
        "q = 5 witness {w:?} disagrees with enumeration ({pa} vs {pb})"
    );

    let src = std::fs::read_to_string(data("inverse.prog")).unwrap();
    for (p, k) in [(5, 1), (7, 1), (5, 2), (7, 2)] {
        let base = FieldCtx::prime(p).unwrap();
        let ext = FieldCtx::new(p, k).unwrap();
        let prog = parse_program_file(&base, &src)?;
        for x in ext.elements().filter(|x| !x.is_zero()) {
            let inv = ext.elements().find(|y| ext.mul(&x, y).is_one()).unwrap();
            let d = distribution(&prog, &ArithProgram::empty(&base), &[x], k, &limits).map_err(|e| e.to_string())?;
            ensure!(
                d == Distribution::Dist(BTreeMap::from([(vec![inv], rational(1, 1))])),
                "inverse over F_{p}^{k} at {x:?}: {d:?}"
            );
        }
    }
    Ok(format!("witness x = {:?}, output {:?}, {} vs {}", x, w.output, pa, pb))
}

fn f_add(ctx: &FieldCtx, a: FieldElement, c: u64) -> FieldElement {
    ctx.add(&a, &ctx.from_u64(c))
}

fn reduction_soundness() -> Outcome {
    let limits = EquivLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut same, mut differ) = (0, 0);
    for i in 0..50 {
        let ctx = FieldCtx::prime(if i % 2 == 0 { 3 } else { 5 }).unwrap();
        let q = common::random_query(&ctx, &mut rng);
        let r = reduce_query(&q, &limits).map_err(|e| format!("query {i}: {e}"))?;
        ensure!(r.is_arithmetic(), "query {i}: reduction left a conditional");
        for k in 1..=2 {
            let before = equivalent_at(&q, k, &limits).map_err(|e| format!("query {i}: {e}"))?;
            let after = equivalent_at(&r, k, &limits).map_err(|e| format!("query {i} reduced: {e}"))?;
            ensure!(before == after, "query {i} at k = {k}: {before} before, {after} after\n{q}\n{r}");
            if before {
                same += 1;
            } else {
                differ += 1;
            }
        }
    }
    Ok(format!("50 queries, {same} equivalent and {differ} inequivalent verdicts preserved"))
}

fn cli_json(args: &[&str], allowed: &[i32]) -> Result<String, String> {
    let mut argv = vec!["kronzeta", "--json"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = kronzeta::cli::run(argv, &mut out, &mut err);
    ensure!(allowed.contains(&code), "{args:?} exited {code}: {}", String::from_utf8_lossy(&err));
    Ok(String::from_utf8(out).unwrap())
}

fn reserialize<T: serde::de::DeserializeOwned + serde::Serialize>(text: &str) -> Result<(), String> {
    let v: T = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    ensure!(again == text, "output changed on round trip:\n{text}\n{again}");
    Ok(())
}

fn round_trips(reports: &[ZetaReport]) -> Outcome {
    let mut sequences = 0;
    for r in reports {
        let z = rational_reconstruct(&r.counts, r.budget).map_err(|e| e.to_string())?;
        ensure!(z == r.zeta, "reconstruction differs from the reported zeta function");
        let back: Vec<CountRecord> = counts_from_zeta(&z, r.counts.len() as u32).map_err(|e| e.to_string())?;
        ensure!(back == r.counts, "counts {:?} came back as {:?}", r.counts, back);
        sequences += 1;
    }
    let path = |n: &str| data(n).display().to_string();
    reserialize::<CountOut>(&cli_json(&["count", &path("parabola_f5.sys"), "-k", "2"], &[0])?)?;
    reserialize::<KroneckerOut>(&cli_json(&["kronecker", &path("five_f13.sys")], &[0])?)?;
    reserialize::<ZetaOut>(&cli_json(&["zeta", &path("hyperbola_f5.sys")], &[0])?)?;
    reserialize::<ZetaOut>(&cli_json(&["zeta", &path("hyperbola_f5.sys"), "--kmax", "3"], &[3])?)?;
    reserialize::<EquivOut>(&cli_json(&["equiv", &path("squares_f5.query")], &[1])?)?;
    reserialize::<EquivOut>(&cli_json(&["equiv", &path("squares_f3.query"), "--reduce"], &[0])?)?;
    reserialize::<BenchOut>(&cli_json(&["bench-m", "--m-from", "4", "--m-to", "6", "--reps", "1"], &[0])?)?;
    Ok(format!("{sequences} count sequences, 7 CLI outputs"))
}

fn run(results: &mut Vec<bool>, name: &str, f: impl FnOnce() -> Outcome) {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    match &outcome {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(why) => println!("FAIL {name}: {why}"),
    }
    results.push(outcome.is_ok());
}

fn main() {
    let mut results = Vec::new();
    let systems = kronecker_systems();
    let mut witnesses = Vec::new();
    let mut reports = Vec::new();
    run(&mut results, "1 kronecker zero sets", || kronecker_sets(&systems, &mut witnesses));
    run(&mut results, "2 dependency identity", || dependency_identity(&witnesses));
    run(&mut results, "3 zeta closed forms", || zeta_closed_forms(&mut reports));
    run(&mut results, "4 counting paths agree", counting_paths);
    run(&mut results, "5 scaling in m", scaling_in_m);
    run(&mut results, "6 small-field zeta counts", || small_q_branch(&mut reports));
    run(&mut results, "7 program examples", program_examples);
    run(&mut results, "8 reduction soundness", reduction_soundness);
    run(&mut results, "9 round trips", || round_trips(&reports));
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
