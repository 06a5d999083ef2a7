use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use majorization::majorize::{certificate_margin, MajorizationVerdict};
use majorization::VectorStepFunction;
use serde_json::Value;
use tempfile::TempDir;

fn majorize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorize"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn identical_files_hold_with_identity() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.json",
        r#"{"weights": [1, 2], "values": [[2, 1], [0, 1]]}"#,
    );
    for cmd in ["check-matrix", "check-multivariate", "check-vector"] {
        let input = if cmd == "check-vector" {
            write(
                &dir,
                "v.json",
                r#"{"weights": [1, 2], "values": [[2], [0]]}"#,
            )
        } else {
            f.clone()
        };
        let out = majorize(&[cmd, s(&input), s(&input)]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let v = stdout_json(&out);
        assert_eq!(v["holds"], true);
        assert_eq!(
            v["witness"]["table"],
            serde_json::json!([[1.0, 0.0], [0.0, 0.5]]),
            "{cmd}"
        );
    }
}

#[test]
fn infeasible_pair_ships_a_replayable_certificate() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"values": [[2, 1], [0, 1]]}"#);
    let f = write(&dir, "f.json", r#"{"values": [[1, 1], [1, 1]]}"#);
    let out = majorize(&["check-matrix", s(&g), s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let verdict: MajorizationVerdict = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!verdict.holds && verdict.witness.is_none());
    let lhs: VectorStepFunction = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    let rhs: VectorStepFunction = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
    let margin = certificate_margin(verdict.certificate.as_ref().unwrap(), &lhs, &rhs).unwrap();
    assert!(margin >= 1e-7);
    assert!((margin - verdict.margin.unwrap()).abs() <= 1e-12);

    let out = majorize(&["check-matrix", s(&f), s(&g)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_2_without_output_file() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", r#"{"values": [[1], [2]]}"#);
    let truncated = write(&dir, "bad.json", r#"{"values": [[1], [2"#);
    let three = write(&dir, "three.json", r#"{"values": [[1], [2], [3]]}"#);
    let out_path = dir.path().join("out.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["check-vector", s(&truncated), s(&good)],
        vec!["check-vector", s(&good), s(&three)],
        vec!["check-multivariate", s(&good), s(&three)],
        vec!["check-matrix", s(&good), "/nonexistent/path.json"],
        vec!["check-vector", s(&good), s(&good), "--tolerance", "-1"],
    ];
    for mut args in cases {
        args.extend(["--out", s(&out_path)]);
        let out = majorize(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(!out_path.exists(), "{args:?}");
    }
    assert_eq!(majorize(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"values": [[2], [2]]}"#);
    let y = write(&dir, "y.json", r#"{"values": [[3], [1]]}"#);
    let out_path = dir.path().join("w.json");
    let direct = majorize(&["witness-hlp", s(&x), s(&y)]);
    let filed = majorize(&["witness-hlp", s(&x), s(&y), "--out", s(&out_path)]);
    assert_eq!(filed.status.code(), Some(0));
    assert!(filed.stdout.is_empty());
    assert_eq!(fs::read(&out_path).unwrap(), direct.stdout);
    assert_eq!(
        stdout_json(&direct)["table"],
        serde_json::json!([[0.5, 0.5], [0.5, 0.5]])
    );

    let reversed = majorize(&["witness-hlp", s(&y), s(&x)]);
    assert_eq!(reversed.status.code(), Some(1));
    assert_eq!(stdout_json(&reversed)["holds"], false);
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"values": [[0.1], [0.2]]}"#);
    let out = majorize(&["rearrange", s(&f)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2.0000000000000001e-1"), "{text}");
    assert!(text.contains("1.0000000000000001e-1"), "{text}");
}

#[test]
fn rearrange_of_constant_is_one_segment() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.json",
        r#"{"weights": [0.5, 1.5], "values": [[3], [3]]}"#,
    );
    let out = majorize(&["rearrange", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["levels"], serde_json::json!([3.0]));
    assert_eq!(v["breakpoints"], serde_json::json!([0.0, 2.0]));
}

#[test]
fn divergence_and_perspective() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"values": [[1], [4]]}"#);
    let phi = write(
        &dir,
        "phi.json",
        r#"{"pieces": [{"slope": [1], "intercept": -1}, [0]]}"#,
    );
    let out = majorize(&["divergence", s(&f), s(&f), s(&phi)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["divergence"], 0.0);

    let out = majorize(&["perspective", s(&phi)]);
    assert_eq!(
        stdout_json(&out)["pieces"],
        serde_json::json!([[1.0, -1.0], [0.0, 0.0]])
    );

    let h = write(&dir, "h.json", r#"{"values": [[1], [0]]}"#);
    assert_eq!(
        majorize(&["divergence", s(&f), s(&h), s(&phi)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn approx_demo_meets_the_bin_width_bound() {
    let dir = TempDir::new().unwrap();
    let m = 1024;
    let values: Vec<Vec<f64>> = (0..m).map(|i| vec![(i as f64 + 0.5) / m as f64]).collect();
    let body =
        serde_json::json!({"weights": vec![1.0 / m as f64; m], "values": values}).to_string();
    let f = write(&dir, "f.json", &body);
    let out = majorize(&["approx-demo", s(&f), "--levels", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 10);
    let mut previous = f64::INFINITY;
    for row in rows {
        let level = row["level"].as_f64().unwrap();
        let err = row["l1_error"].as_f64().unwrap();
        let refined = row["refined_l1_error"].as_f64().unwrap();
        assert!(err <= 1.0 / level);
        assert!(refined <= previous + 1e-12);
        previous = refined;
    }
}

#[test]
fn scalar_equiv_reports_agreement() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"values": [[1], [1]]}"#);
    let h = write(&dir, "h.json", r#"{"values": [[1], [1]]}"#);
    let g = write(&dir, "g.json", r#"{"values": [[2], [0]]}"#);
    let out = majorize(&["scalar-equiv", s(&f), s(&h), s(&g), s(&h)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["stochastic"], true);
    assert_eq!(v["ratio_majorized"], true);
    assert_eq!(v["reverse_ratio_majorized"], false);
}

#[test]
fn exact_flag_gives_the_same_verdict() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"values": [[2, 1], [0, 1]]}"#);
    let f = write(&dir, "f.json", r#"{"values": [[1, 1], [1, 1]]}"#);
    for (a, b, code) in [(&f, &g, 0), (&g, &f, 1)] {
        let out = majorize(&["check-matrix", s(a), s(b), "--exact"]);
        assert_eq!(out.status.code(), Some(code));
    }
}
