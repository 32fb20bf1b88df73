use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anharmonic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn theorem_runs_exit_zero() {
    let out = run(&["verify", "theorem1", "--potential", "z^4", "--K", "3", "--box", "3x3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["passed"], true);

    let out = run(&["verify", "theorem2", "--qes", "m=1,p=0,b=0", "--box", "3x3"]);
    assert_eq!(code(&out), 0);

    let out = run(&["verify", "theorem1", "--potential", "z^4+z^2", "--K", "4"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let out = run(&["verify", "trees"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn corollary_suite_passes() {
    let out = run(&["verify", "corollary", "--m-max", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn enumerate_writes_eleven_forms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trees.json");
    let out = run(&["trees", "enumerate", "--ends", "8", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 11);
    assert!(list.iter().all(|e| e["canonical"].is_string() && e["contour"].is_string()));
}

#[test]
fn usage_and_numerical_errors_exit_one() {
    for args in [
        vec!["spectrum", "--potential", "z^3", "--K", "1"],
        vec!["spectrum", "--potential", "-z^4", "--K", "1"],
        vec!["spectrum", "--K", "1"],
        vec!["zeros", "--potential", "z^4", "--k", "0", "--box", "3by3"],
        vec!["qes", "--qes", "m=1,p=2,b=0"],
        vec!["frobnicate"],
        vec!["trees", "enumerate", "--ends", "7"],
        vec!["spectrum", "--potential", "z^2", "--K", "2", "--tol", "-1"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?} printed no diagnostic");
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validation_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kinds":["plain"],"rotation":[[{"end":0},{"end":2},{"end":1}]]}"#);
    let out = run(&["trees", "validate", &bad]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["valid"], false);

    let tree = anharmonic::trees::from_census(4, 0, 0).unwrap();
    let kinds = vec![anharmonic::trees::VertexKind::O; tree.vertex_count()];
    let broken = tree.with_kinds(kinds).unwrap();
    let f = write(dir.path(), "o.json", &serde_json::to_string(&broken).unwrap());
    let out = run(&["trees", "validate", &f, "--d", "4"]);
    assert_eq!(code(&out), 2);

    let good = anharmonic::trees::from_census(4, 2, 0).unwrap();
    let f = write(dir.path(), "good.json", &serde_json::to_string(&good).unwrap());
    let out = run(&["trees", "validate", &f, "--d", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["structure"]["x_condition"], true);

    let lc = anharmonic::trees::exponential_complex(5);
    let f = write(dir.path(), "lc.json", &serde_json::to_string(&lc).unwrap());
    assert_eq!(code(&run(&["trees", "validate", &f])), 0);
    let mut broken = lc.clone();
    broken.labels.as_mut().unwrap()[0][0] = 1 - broken.labels.as_ref().unwrap()[0][0];
    let f = write(dir.path(), "lc_bad.json", &serde_json::to_string(&broken).unwrap());
    assert_eq!(code(&run(&["trees", "validate", &f])), 2);
}

#[test]
fn outputs_are_byte_identical() {
    let cases: [&[&str]; 5] = [
        &["spectrum", "--potential", "z^4+z^2", "--K", "4"],
        &["zeros", "--potential", "z^4", "--k", "3"],
        &["qes", "--qes", "m=3,p=1,b=0.5"],
        &["asymptotic", "--qes", "m=2,p=0,b=-1", "--k", "1"],
        &["gscan", "--k", "0", "--m", "1", "--p", "0", "--b-min", "-1", "--b-max", "1", "--b-step", "0.5"],
    ];
    for args in cases {
        let first = bin().args(args).env("ANHARMONIC_WORKERS", "1").output().unwrap();
        let second = bin().args(args).env("ANHARMONIC_WORKERS", "3").output().unwrap();
        let third = run(args);
        assert_eq!(code(&first), 0, "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.stdout, third.stdout, "{args:?}");
    }
}

#[test]
fn json_floats_carry_seventeen_digits() {
    let out = run(&["spectrum", "--potential", "z^2", "--K", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"lambda\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let digits = mantissa.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
    assert_eq!(digits, 17, "{line}");
}

#[test]
fn gscan_emits_csv() {
    let out = run(&["gscan", "--k", "0", "--m", "0", "--p", "0", "--b-min", "-3", "--b-max", "3", "--b-step", "0.5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,g"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (b, g) = l.split_once(',').unwrap();
            (b.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|&(_, g)| g > -std::f64::consts::FRAC_PI_2 && g < 0.0));
    assert!(rows.last().unwrap().1 < rows[0].1);
}
