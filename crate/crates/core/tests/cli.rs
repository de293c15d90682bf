use std::path::{Path, PathBuf};
use std::process::Command;

use kronzeta::cli::{run, EXIT_CAP, EXIT_INPUT, EXIT_OK, EXIT_VERDICT};
use kronzeta::count::{count_points, Limits, PolySystem};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["kronzeta"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn count_of_a_point() {
    assert_eq!(call(&["count", &data("point_f5.sys"), "-k", "1"]), (EXIT_OK, "1\n".into(), String::new()));
    let (code, out, _) = call(&["count", &data("parabola_f5.sys"), "-k", "2", "--ie"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "25\n"));
}

#[test]
fn zeta_of_the_line() {
    let (code, out, _) = call(&["zeta", &data("line_f5.sys")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("numerator: 1\n"), "{out}");
    assert!(out.contains("denominator: 1 - 5*T\n"), "{out}");
}

#[test]
fn equivalence_verdicts() {
    let (code, out, _) = call(&["equiv", &data("squares_f5.query")]);
    assert_eq!(code, EXIT_VERDICT);
    assert!(out.contains("inequivalent"), "{out}");
    assert!(out.contains("2/25"), "{out}");
    let (code, out, _) = call(&["equiv", &data("squares_f3.query"), "--reduce"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn kronecker_output_is_a_system_file() {
    let (code, out, _) = call(&["kronecker", &data("five_f13.sys")]);
    assert_eq!(code, EXIT_OK);
    let g: PolySystem = out.parse().unwrap();
    assert_eq!(g.polys().len(), 3);
    let f: PolySystem = std::fs::read_to_string(data("five_f13.sys")).unwrap().parse().unwrap();
    for k in 1..=2 {
        let l = Limits::default();
        assert_eq!(count_points(&g, k, &l).unwrap(), count_points(&f, k, &l).unwrap());
    }
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sys");
    std::fs::write(&bad, "5 1 2\nx1 +* x2\n").unwrap();
    let bad = bad.display().to_string();
    let missing = dir.path().join("missing.sys").display().to_string();
    for args in [
        vec!["count", missing.as_str()],
        vec!["count", bad.as_str()],
        vec!["count", &data("point_f5.sys"), "-k", "0"],
        vec!["frobnicate"],
        vec!["zeta", &data("line_f5.sys"), "--budget", "1"],
        vec!["--workers", "0", "count", &data("point_f5.sys")],
        vec!["equiv", &data("point_f5.sys")],
    ] {
        let (code, out, err) = call(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}: {out}");
        assert!(!err.is_empty());
    }
    let (code, _, _) = call(&["kronecker", &data("redundant_f2.sys")]);
    assert_eq!(code, EXIT_INPUT, "F_2 is below the reduction threshold");
}

#[test]
fn caps() {
    let (code, _, err) = call(&["--max-points", "10", "count", &data("parabola_f5.sys")]);
    assert_eq!(code, EXIT_CAP);
    assert!(err.contains("10"), "{err}");
    let (code, _, _) = call(&["--max-nodes", "3", "equiv", &data("squares_f5.query")]);
    assert_eq!(code, EXIT_CAP);
    let (code, out, _) = call(&["zeta", &data("hyperbola_f5.sys"), "--kmax", "3"]);
    assert_eq!(code, EXIT_CAP);
    assert!(out.contains("no zeta function"), "{out}");
}

#[test]
fn help_and_version() {
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn json_is_independent_of_workers() {
    for args in [
        vec!["count", &data("parabola_f5.sys") as &str, "-k", "2"],
        vec!["kronecker", &data("five_f13.sys")],
        vec!["zeta", &data("redundant_f2.sys")],
        vec!["equiv", &data("squares_f5.query"), "--kmax", "2"],
    ] {
        let outputs: Vec<_> = ["1", "3", "8"]
            .iter()
            .map(|w| {
                let mut a = vec!["--json", "--workers", w];
                a.extend_from_slice(&args);
                call(&a)
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
        serde_json::from_str::<serde_json::Value>(&outputs[0].1).unwrap();
    }
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_kronzeta"))
}

#[test]
fn binary_exit_codes_and_environment() {
    let out = Command::new(binary()).args(["count", &data("point_f5.sys")]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1\n");
    let out = Command::new(binary())
        .args(["count", &data("parabola_f5.sys")])
        .env("KRONZETA_MAX_POINTS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CAP));
    let out = Command::new(binary()).args(["equiv", &data("squares_f5.query")]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VERDICT));
    let out = Command::new(binary()).args(["count"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
