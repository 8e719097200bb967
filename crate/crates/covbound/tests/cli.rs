use std::path::Path;
use std::process::{Command, Output};

fn covbound(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covbound"))
        .args(args)
        .current_dir(dir)
        .env("COVBOUND_SOLVER", env!("CARGO_BIN_EXE_covbound-sdpa"))
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bound_binary_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["bound", "--q", "2", "--n", "4", "--r", "1", "--ineq", "sphere,vanwee"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["integerBound"], 4);
    assert_eq!(doc["schemaVersion"], 1);
    assert_eq!(doc["objectiveKind"], "triple");
    assert!(doc["rawValue"].is_string());
}

#[test]
fn bound_ternary() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["bound", "--q", "3", "--n", "6", "--r", "1", "--ineq", "sphere"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["integerBound"], 61);
    let root = doc["rootValue"].as_f64().unwrap();
    assert!((root - 60.8568).abs() / 60.8568 < 5e-3, "{root}");
}

#[test]
fn no_solve_only_writes_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["bound", "--q", "2", "--n", "4", "--r", "1", "--no-solve", "--solver", "/nonexistent"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["status"], "notSolved");
    let file = dir.path().join(doc["problemFile"].as_str().unwrap());
    assert!(file.exists());
    assert!(!file.with_extension("log").exists());
}

#[test]
fn custom_inequality_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ineq.txt"), "2 4\n1\n1 1 0 0 0\n").unwrap();
    let out = covbound(&["bound", "--q", "2", "--n", "4", "--r", "1", "--ineq", "file:ineq.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["inequalities"][0], "file:ineq.txt");
}

#[test]
fn invalid_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["bound", "--q", "2", "--n", "4"],
        vec!["bound", "--q", "2", "--n", "4", "--r", "4"],
        vec!["bound", "--q", "3", "--n", "4", "--r", "1", "--ineq", "vanwee"],
        vec!["bound", "--q", "2", "--n", "4", "--r", "1", "--objective", "quad"],
        vec!["bound", "--q", "2", "--n", "4", "--r", "1", "--margin", "-1"],
        vec!["bound", "--q", "2", "--n", "4", "--r", "1", "--ineq", "file:missing.txt"],
        vec!["table", "--n", "9..4"],
        vec!["frobnicate"],
    ] {
        let out = covbound(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["bound", "--q", "2", "--n", "4", "--r", "1", "--solver", "/nonexistent/sdpa"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "solverError");
    let out = covbound(&["bound", "--q", "2", "--n", "4", "--r", "1", "--timeout", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn table_matches_small_binary_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["table", "--q", "2", "--n", "4..8", "--r", "1", "--jobs", "3", "--workdir", "."], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("# schemaVersion=1\nq,n,r,method,objective,rawValue,rootValue,bound,knownLower,knownUpper,flag,wallTime\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row[10], "match", "{row:?}");
    }
}

#[test]
fn table_is_order_independent() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |text: String| -> Vec<Vec<String>> { data_rows(&text).into_iter().map(|mut r| { r.pop(); r }).collect() };
    let serial = covbound(&["table", "--q", "2,3", "--n", "3..5", "--r", "1..2", "--method", "lp"], dir.path());
    let parallel = covbound(&["table", "--q", "3,2", "--n", "5,3,4", "--r", "2,1", "--method", "lp", "--jobs", "4"], dir.path());
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(strip(stdout(&serial)), strip(stdout(&parallel)));
}

#[test]
fn lp_table_never_flags_unsound() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["table", "--q", "2..3", "--n", "4..9", "--r", "1..3", "--method", "lp", "--out", "lp.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("lp.csv")).unwrap();
    assert!(!text.contains("UNSOUND"));
    let row = data_rows(&text).into_iter().find(|r| r[..3] == ["3", "4", "1"]).unwrap();
    assert_eq!(row[7], "9");
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = covbound(&["verify", "--suite", "coefficients", "--qmax", "3", "--nmax", "4", "--nmax-binary", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| l.starts_with("pass")));
    let out = covbound(&["verify", "--suite", "blockmap", "--q", "2", "--n", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let code = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/codes/hamming7.code");
    let out = covbound(&["verify", "--suite", "witness", "--code", code.to_str().unwrap(), "--r", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("feasible"));
}

#[test]
fn verify_reports_a_bad_witness() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("rep.code"), "2 3\n000\n111\n").unwrap();
    // Radius 0 is not covered by the repetition code.
    let out = covbound(&["verify", "--suite", "witness", "--code", "rep.code", "--r", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL"));
}

#[test]
fn dumps_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = covbound(&["dump-coefficients", "--q", "3", "--n", "3"], dir.path());
    let b = covbound(&["dump-coefficients", "--q", "3", "--n", "3"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().all(|l| l.split(" = ").count() == 2));
    let lp = covbound(&["lp-dump", "--q", "2", "--n", "3", "--r", "1", "--ineq", "sphere"], dir.path());
    let text = stdout(&lp);
    assert!(text.contains("min 8 0 0 0"));
    // three families over k = 0..3 plus nonnegativity
    assert_eq!(text.lines().filter(|l| l.contains(">=")).count(), 16);
    let ineq = covbound(&["lp-dump", "--q", "2", "--n", "3", "--r", "1", "--ineq", "vanwee", "--format", "ineq"], dir.path());
    std::fs::write(dir.path().join("vw.txt"), &ineq.stdout).unwrap();
    let back = covbound(&["bound", "--q", "2", "--n", "3", "--r", "1", "--ineq", "file:vw.txt", "--no-solve"], dir.path());
    assert_eq!(back.status.code(), Some(0));
}
