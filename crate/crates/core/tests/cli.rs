use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qig::cli::{read_matrix, write_matrix, MatrixFile};
use qig::linalg::from_rows;
use tempfile::TempDir;

fn qig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qig")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

struct Fixture {
    _dir: TempDir,
    qubit: String,
    mixed: String,
    sigma_x: String,
    diag: String,
    not_density: String,
    ragged: String,
    measure: String,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    Fixture {
        qubit: s(write(dir.path(), "d.json", r#"{"n": 2, "data": [[[0.75,0],[0,0]],[[0,0],[0.25,0]]]}"#)),
        mixed: s(write(dir.path(), "m.json", r#"{"n": 2, "data": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#)),
        sigma_x: s(write(dir.path(), "x.json", r#"{"n": 2, "data": [[[0,0],[1,0]],[[1,0],[0,0]]]}"#)),
        diag: s(write(dir.path(), "a.json", r#"{"n": 2, "data": [[[1,0],[0,0]],[[0,0],[0,0]]]}"#)),
        not_density: s(write(dir.path(), "bad.json", r#"{"n": 2, "data": [[[0.7,0],[0,0]],[[0,0],[0.7,0]]]}"#)),
        ragged: s(write(dir.path(), "ragged.json", r#"{"n": 2, "data": [[[1,0]],[[0,0],[0,0]]]}"#)),
        measure: s(write(dir.path(), "mu.json", "[[0.0, 0.5],[1.0, 0.5]]")),
        _dir: dir,
    }
}

#[test]
fn umegaki_of_diagonal_pair() {
    let f = fixture();
    let o = qig(&["compute", "umegaki", "--state", &f.mixed, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0.143841036226");
}

#[test]
fn skew_and_covariances_on_qubit() {
    let f = fixture();
    let cases: &[(&[&str], &str)] = &[
        (&["compute", "skew", "--fn", "sld"], "0.25"),
        (&["compute", "cov"], "1"),
        (&["compute", "gen-cov", "--fn", "tilde:sld"], "0.75"),
        (&["compute", "fisher", "--fn", "sld"], "4"),
        (&["compute", "wyd", "--p", "0.5"], "0.133974596216"),
    ];
    for (args, expected) in cases {
        let mut a = args.to_vec();
        a.extend(["--state", &f.qubit, "--obs", &f.sigma_x]);
        let o = qig(&a);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert_eq!(stdout(&o).trim(), *expected, "{args:?}");
    }
}

#[test]
fn quasi_entropy_with_kernel() {
    let f = fixture();
    let o = qig(&["compute", "quasi-entropy", "--kernel", "neg-log", "--state", &f.mixed, "--state2", &f.qubit]);
    assert_eq!(stdout(&o).trim(), "0.143841036226", "{}", stderr(&o));
    let o = qig(&["compute", "quasi-entropy", "--fn", &format!("hansen:{}", f.measure), "--state", &f.qubit, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn renyi_alpha_zero_is_domain_error() {
    let f = fixture();
    let o = qig(&["compute", "renyi", "--alpha", "0", "--state", &f.mixed, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("alpha must be nonzero"), "{}", stderr(&o));
    let o = qig(&["compute", "renyi", "--alpha", "-0.5", "--state", &f.mixed, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn exit_codes_for_bad_input() {
    let f = fixture();
    let o = qig(&["compute", "umegaki", "--state", &f.ragged, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 0"), "{}", stderr(&o));
    let o = qig(&["compute", "umegaki", "--state", "/nonexistent.json", "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(2));
    let o = qig(&["compute", "umegaki", "--state", &f.not_density, "--state2", &f.qubit]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("invariant"), "{}", stderr(&o));
    let o = qig(&["compute", "skew", "--fn", "nonsense", "--state", &f.qubit, "--obs", &f.sigma_x]);
    assert_eq!(o.status.code(), Some(2));
    let o = qig(&["compute", "umegaki", "--state", &f.qubit]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fisher_requires_standard_function() {
    let f = fixture();
    let o = qig(&["compute", "fisher", "--fn", "power:0.3", "--state", &f.qubit, "--obs", &f.diag]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn verify_skew_identity_passes() {
    let o = qig(&["verify", "skew-identity", "--trials", "50", "--dim", "4", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = v["suites"][0]["max_residual"].as_f64().unwrap();
    assert!(r <= 1e-9);
    assert_eq!(v["seed"], 7);
}

#[test]
fn verify_all_with_zero_trials() {
    let o = qig(&["verify", "all", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for s in v["suites"].as_array().unwrap() {
        assert!(s["failures"].as_array().unwrap().is_empty());
        assert!(s["min_margin"].is_null());
    }
}

#[test]
fn verify_unknown_suite() {
    let o = qig(&["verify", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_failures_exit_one_with_seeds() {
    let o = qig(&["verify", "renyi-limit", "--trials", "3", "--dim", "3", "--tol", "gap=0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL renyi-limit seed=0 trial="), "{}", stderr(&o));
    let o = qig(&["verify", "renyi-limit", "--tol", "nonsense=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible_apart_from_elapsed() {
    let dir = TempDir::new().unwrap();
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        for s in v["suites"].as_array_mut().unwrap() {
            s["elapsed_seconds"] = serde_json::Value::Null;
        }
        serde_json::to_string(&v).unwrap()
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = qig(&["verify", "det-uncertainty", "--trials", "30", "--seed", "3", "--dim", "2-4", "--report", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn markdown_report() {
    let o = qig(&["verify", "wyd-consistency", "--trials", "5", "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("| wyd-consistency | 5 |"));
}

#[test]
fn list_output() {
    let o = qig(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("sld f(0)=0.5"));
    assert!(text.contains("wyd:<p> f(0)=p(1-p)"));
    for s in [
        "standardness",
        "operator-monotone",
        "scalar-gibi",
        "skew-identity",
        "hessian",
        "lemma-commuting",
        "lemma-cross",
        "monotonicity",
        "concavity",
        "det-uncertainty",
        "oracle-equivalence",
        "wyd-consistency",
        "renyi-limit",
    ] {
        assert!(text.contains(s), "{s}");
    }
}

#[test]
fn matrix_file_round_trip_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("m.json");
    let m = from_rows(&[
        &[(0.1 + 0.2, 1.0 / 3.0), (f64::MIN_POSITIVE, -2.0f64.sqrt())],
        &[(std::f64::consts::PI, 1e300), (-0.0, 5e-324)],
    ]);
    write_matrix(&p, &m).unwrap();
    let back = read_matrix(&p).unwrap();
    for (a, b) in m.iter().zip(back.iter()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
    let parsed: MatrixFile = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(parsed.n, 2);
}
