//! Command-line front end.
//!
//! Exit status: 0 success, 1 a mathematical negative (inequivalence, or no
//! zeta function found for a reason other than a cap), 2 unusable input,
//! 3 a cap was exhausted.

pub mod files;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{bench_m, BenchError, BenchParams};
use crate::count::{count_points, count_points_ie, CountError, Limits, PolySystem};
use crate::kronecker::reduce_affine;
use crate::progequiv::{reduce_query, universal_equivalence, EquivLimits, ProgError, Verdict};
use crate::zeta::{zeta_main, ZetaConfig};
use output::{BenchOut, CountOut, EquivOut, KroneckerOut, ZetaOut};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kronzeta", version, about = "Point counts, zeta functions and program equivalence over finite fields")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of points enumerated by one count.
    #[arg(long, global = true, env = "KRONZETA_MAX_POINTS")]
    max_points: Option<u64>,
    /// Largest field size q^k constructed.
    #[arg(long, global = true, env = "KRONZETA_MAX_FIELD")]
    max_field: Option<u64>,
    /// Most polynomials accepted by inclusion-exclusion counting.
    #[arg(long, global = true, env = "KRONZETA_MAX_IE_POLYS")]
    max_ie_polys: Option<usize>,
    /// Number of chunks counting is split into.
    #[arg(long, global = true, env = "KRONZETA_WORKERS")]
    workers: Option<usize>,
    /// Search nodes one distribution computation may visit.
    #[arg(long, global = true, env = "KRONZETA_MAX_NODES")]
    max_nodes: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Number of common zeros over F_{q^k}.
    Count {
        file: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        k: u32,
        /// Count by inclusion-exclusion over subset products.
        #[arg(long)]
        ie: bool,
    },
    /// Replace the system by n+1 polynomials with the same zeros.
    Kronecker { file: PathBuf },
    /// Zeta function of the system's affine variety.
    Zeta {
        file: PathBuf,
        /// Largest k whose count may be used.
        #[arg(long, env = "KRONZETA_KMAX", default_value_t = 40)]
        kmax: u32,
        /// Largest degree budget tried.
        #[arg(long, env = "KRONZETA_BUDGET", default_value_t = 16)]
        budget: u32,
    },
    /// Check a program equivalence query over F_{q^k}, k = 1..kmax.
    Equiv {
        file: PathBuf,
        #[arg(long, env = "KRONZETA_EQUIV_KMAX", default_value_t = 2)]
        kmax: u32,
        /// Rewrite the query into arithmetic programs first.
        #[arg(long)]
        reduce: bool,
    },
    /// Time reduced counting against inclusion-exclusion as m grows.
    BenchM {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 13)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        m_from: usize,
        #[arg(long, default_value_t = 16)]
        m_to: usize,
        #[arg(long, default_value_t = 2)]
        m_step: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub limits: Limits,
    pub equiv: EquivLimits,
    pub json: bool,
}

impl Config {
    fn from_args(g: &GlobalArgs) -> Result<Config, String> {
        let mut limits = Limits::default();
        let mut equiv = EquivLimits::default();
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(format!("--{name} must be positive"))
            } else {
                Ok(v)
            }
        };
        if let Some(v) = g.max_points {
            limits.max_points = positive("max-points", v)?;
        }
        if let Some(v) = g.max_field {
            limits.max_field = positive("max-field", v)?;
            equiv.max_field = v;
        }
        if let Some(v) = g.max_ie_polys {
            limits.max_ie_polys = positive("max-ie-polys", v as u64)? as usize;
        }
        if let Some(v) = g.workers {
            limits.workers = positive("workers", v as u64)? as usize;
        }
        if let Some(v) = g.max_nodes {
            equiv.max_nodes = positive("max-nodes", v)?;
        }
        Ok(Config {
            limits,
            equiv,
            json: g.json,
        })
    }
}

struct Outcome {
    code: i32,
    text: String,
}

fn emit<T: serde::Serialize>(cfg: &Config, value: &T, human: String, code: i32) -> Outcome {
    let text = if cfg.json {
        let mut s = serde_json::to_string_pretty(value).expect("output is serializable");
        s.push('\n');
        s
    } else {
        human
    };
    Outcome { code, text }
}

struct Failure {
    code: i32,
    msg: String,
}

fn input(msg: impl ToString) -> Failure {
    Failure {
        code: EXIT_INPUT,
        msg: msg.to_string(),
    }
}

fn count_failure(e: CountError) -> Failure {
    let code = match e {
        CountError::CapExceeded { .. } | CountError::Field(crate::ff::FieldError::TooLarge { .. }) => EXIT_CAP,
        CountError::Field(_) => EXIT_INPUT,
    };
    Failure {
        code,
        msg: e.to_string(),
    }
}

fn prog_failure(e: ProgError) -> Failure {
    let code = match e {
        ProgError::CapExceeded { .. } | ProgError::Field(crate::ff::FieldError::TooLarge { .. }) => EXIT_CAP,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        msg: e.to_string(),
    }
}

fn load_system(path: &Path) -> Result<PolySystem, Failure> {
    let text = files::read(path).map_err(input)?;
    text.parse::<PolySystem>()
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Cmd, cfg: &Config) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Count { file, k, ie } => {
            if k == 0 {
                return Err(input("-k must be at least 1"));
            }
            let f = load_system(&file)?;
            let count = if ie {
                count_points_ie(&f, k, &cfg.limits)
            } else {
                count_points(&f, k, &cfg.limits)
            }
            .map_err(count_failure)?;
            let out = CountOut {
                field: f.ctx().into(),
                nvars: f.nvars(),
                k,
                method: if ie { "inclusion-exclusion" } else { "enumeration" }.into(),
                count: count.to_string(),
            };
            Ok(emit(cfg, &out, out.human(), EXIT_OK))
        }
        Cmd::Kronecker { file } => {
            let f = load_system(&file)?;
            let r = reduce_affine(f.ctx(), f.nvars(), f.polys()).map_err(input)?;
            let out = KroneckerOut::new(&f, &r);
            Ok(emit(cfg, &out, out.human(), EXIT_OK))
        }
        Cmd::Zeta { file, kmax, budget } => {
            if budget < 2 {
                return Err(input("--budget must be at least 2"));
            }
            let f = load_system(&file)?;
            let zc = ZetaConfig {
                limits: cfg.limits,
                max_budget: budget,
                k_max: kmax,
            };
            match zeta_main(&f, &zc) {
                Ok(r) => {
                    let out = ZetaOut::complete(&f, &r);
                    Ok(emit(cfg, &out, out.human(), EXIT_OK))
                }
                Err(inc) => {
                    let out = ZetaOut::incomplete(&f, &inc);
                    let code = if inc.cap_hit { EXIT_CAP } else { EXIT_VERDICT };
                    Ok(emit(cfg, &out, out.human(), code))
                }
            }
        }
        Cmd::Equiv { file, kmax, reduce } => {
            let q = files::load_query(&file).map_err(input)?;
            let checked = if reduce {
                reduce_query(&q, &cfg.equiv).map_err(prog_failure)?
            } else {
                q.clone()
            };
            let v = universal_equivalence(&checked, kmax, &cfg.equiv);
            let code = match v {
                Verdict::EquivalentUpTo { .. } => EXIT_OK,
                Verdict::Inequivalent(_) => EXIT_VERDICT,
                Verdict::CapsExceeded { .. } => EXIT_CAP,
            };
            let out = EquivOut::new(&q, &checked, reduce, &v);
            Ok(emit(cfg, &out, out.human(), code))
        }
        Cmd::BenchM {
            n,
            d,
            q,
            m_from,
            m_to,
            m_step,
            seed,
            reps,
        } => {
            let params = BenchParams {
                n,
                d,
                q,
                m_from,
                m_to,
                m_step,
                seed,
                reps,
            };
            let rows = bench_m(&params, &cfg.limits).map_err(|e| match e {
                BenchError::Count(c) => count_failure(c),
                other => input(other),
            })?;
            let out = BenchOut::new(&params, &rows);
            Ok(emit(cfg, &out, out.human(), EXIT_OK))
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`; returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let cfg = match Config::from_args(&cli.global) {
        Ok(c) => c,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_INPUT;
        }
    };
    match dispatch(cli.cmd, &cfg) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
