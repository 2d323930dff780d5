use std::io::Write;
use std::process::{Command, Output};

fn frobint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobint")).args(args).output().expect("spawn frobint")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn curve_file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

#[test]
fn oracle_example() {
    let out = frobint(&["oracle", "--f", "t2^2 - t1^3", "--g", "t2", "--p", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["value"], 3);
    assert_eq!(v["config"]["p"], 7);
}

#[test]
fn twist_seq_example() {
    let out = frobint(&[
        "twist-seq", "--f", "t2 - t1", "--branch", "u,u^2", "--axis", "1", "--n", "0..4",
        "--p", "5", "--out", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let values: Vec<&str> =
        body.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["1", "2", "2", "2", "2"]);
}

#[test]
fn height_csv_example() {
    let c = curve_file(r#"{"p":5,"k":1,"poly":"x1 - x2"}"#);
    let out = frobint(&[
        "height", "--c", c.path().to_str().unwrap(), "--axis", "1", "--n-max", "1", "--out", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let mut lines = body.lines().skip(1);
    // h(0) = 1/2, h(1) = 3/2
    assert!(lines.next().unwrap().starts_with("0,1,1,1,2"));
    assert!(lines.next().unwrap().starts_with("1,1,5,3,2"));
}

#[test]
fn z_intersect_identity() {
    let c = curve_file(r#"{"p":5,"k":1,"poly":"x1*x2 + 3*x1 + 1"}"#);
    let out =
        frobint(&["z-intersect", "--c", c.path().to_str().unwrap(), "--n-max", "4", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for rec in v["result"].as_array().unwrap() {
        assert_eq!(rec["identity_holds"], true);
    }
}

#[test]
fn ss_agreement_and_exit_codes() {
    let out = frobint(&["ss", "--p", "11", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["agreement"], true);
    assert_eq!(v["result"]["bruteforce"]["js"], serde_json::json!(["0", "1"]));

    // bad prime: input error
    assert_eq!(frobint(&["ss", "--p", "4"]).status.code(), Some(2));
}

#[test]
fn global_bezout_complete() {
    let c = curve_file(r#"{"p":5,"k":1,"poly":"x2 - x1^2"}"#);
    let d = curve_file(r#"{"p":5,"k":1,"poly":"x1 - x2^2"}"#);
    let out = frobint(&[
        "global", "--c", c.path().to_str().unwrap(), "--d", d.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["expected"], v["result"]["accounted"]);
    assert_eq!(v["result"]["complete"], true);
}

#[test]
fn density_artin_schreier() {
    let c = curve_file(r#"{"p":5,"k":1,"poly":"x2 - x1"}"#);
    let d = curve_file(r#"{"p":5,"k":1,"poly":"x2 - x1 - 1"}"#);
    let out = frobint(&[
        "density", "--c", c.path().to_str().unwrap(), "--d", d.path().to_str().unwrap(),
        "--m", "5", "--a-max", "4", "--n-max", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sn: Vec<u64> =
        v["result"]["sn"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).collect();
    assert_eq!(sn, [0, 5, 25, 125]);
    assert_eq!(v["result"]["rank_test"]["dense_at_bound"], true);
}

#[test]
fn input_errors_exit_2() {
    // unknown variable
    assert_eq!(
        frobint(&["oracle", "--f", "t3", "--g", "t2", "--p", "5"]).status.code(),
        Some(2)
    );
    // shared component
    assert_eq!(
        frobint(&["oracle", "--f", "t2", "--g", "t2", "--p", "5"]).status.code(),
        Some(2)
    );
    // malformed curve file
    let c = curve_file(r#"{"p":5,"poly":"#);
    assert_eq!(
        frobint(&["z-intersect", "--c", c.path().to_str().unwrap()]).status.code(),
        Some(2)
    );
    // usage error from the argument parser
    assert_eq!(frobint(&["oracle", "--nope"]).status.code(), Some(2));
    // unknown verify suite
    assert_eq!(frobint(&["verify", "nosuch"]).status.code(), Some(2));
}

#[test]
fn verify_suites_exit_status() {
    // spec examples: these suites pass and exit 0
    let out = frobint(&["verify", "corollary", "--p", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = frobint(&["verify", "ss", "--p", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);

    // a failing suite exits 1, not 2
    let out = frobint(&["verify", "density", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_deterministic() {
    let run = || frobint(&["verify", "local", "--seed", "42"]);
    let (a, b) = (run(), run());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    // a different seed still passes but samples differently
    let c = frobint(&["verify", "local", "--seed", "43"]);
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(a.stdout, c.stdout);
}
