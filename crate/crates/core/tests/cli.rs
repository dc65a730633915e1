use std::path::Path;
use std::process::{Command, Output};

const EX1: &str = r#"
[problem]
alpha = 0.5
lambda = 0
a = "0.05*(x+1)"
b = "0.1*sin(x+1)"
phi = "sin(x)"
"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracpicard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_passes_on_example1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ex1.toml", EX1);
    let out = dir.path().join("out");
    let o = bin(&["check", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&out.join("hypotheses.json"));
    assert_eq!(v["all_passed"], true);
}

#[test]
fn check_fails_with_inflated_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "bad.toml", &EX1.replace("0.05*", "0.2*"));
    let out = dir.path().join("out");
    let o = bin(&["check", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("condition (b)") && err.contains("lhs = ") && err.contains("rhs = "),
        "{err}"
    );
    let v = read_json(&out.join("hypotheses.json"));
    assert!(v["hypotheses"]["cond_b"]["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn malformed_expression_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "m.toml", &EX1.replace("sin(x+1)", "sin(x+"));
    assert_eq!(bin(&["check", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(
        bin(&["solve", "--tol", "-1", "--config", &cfg])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solve_writes_constant_csv_for_trivial_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "t.toml",
        "[problem]\nalpha = 0.5\nlambda = 2\na = \"0\"\nb = \"0\"\nphi = \"sin(x)\"\n",
    );
    let out = dir.path().join("out");
    let o = bin(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines[0], "t,re_u,im_u");
    assert_eq!(lines.len(), 257 + 2);
    assert_eq!(*lines.last().unwrap(), "");
    assert!(!csv.contains('\r'));
    for row in &lines[1..258] {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - 2.0).abs() < 1e-14 && cols[2] == 0.0, "{row}");
    }
}

#[test]
fn solve_example1_records_residual_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ex1.toml", EX1);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = bin(&["solve", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let v = read_json(&a.join("certificate.json"));
    assert!(v["residual_sup"].as_f64().unwrap() <= 1e-6);
    for f in ["certificate.json", "solution.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn iteration_cap_reports_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ex1.toml", EX1);
    let o = bin(&[
        "solve",
        "--config",
        &cfg,
        "--max-iter",
        "1",
        "--tol",
        "1e-12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tolerance not reached"));
}

#[test]
fn verify_s_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&[
        "verify-s", "--l", "1", "--a", "0.5", "--n-max", "16", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let n = read_json(&dir.path().join("s_property.json"))["report"]["threshold"]
        .as_u64()
        .unwrap();
    assert!(n <= 3);
    assert_eq!(
        bin(&["verify-s", "--psi", "2*x", "--n-max", "4", "--out", out])
            .status
            .code(),
        Some(1)
    );
    let o = bin(&[
        "verify-s",
        "--a",
        "0.9",
        "--analytic",
        "--n-max",
        "4",
        "--out",
        out,
    ]);
    assert!(stderr(&o).contains("admissibility bound"));
    assert!(
        read_json(&dir.path().join("s_property.json"))["report"]["stages"]
            .as_array()
            .unwrap()
            .len()
            == 4
    );
}

#[test]
fn examples_run_and_reject_inadmissible_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1");
    let o = bin(&["example", "example1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&out.join("certificate.json"));
    assert_eq!(v["lens"]["inclusion"]["holds"], true);
    assert!(v["gevrey"]["decay"]["fit"]["rate"].as_f64().unwrap() > 0.0);
    assert_eq!(v["gevrey"]["target_class"].as_f64(), Some(1.0));

    let out2 = dir.path().join("e2");
    let o = bin(&[
        "example",
        "example2",
        "--alpha",
        "0.5",
        "--eta",
        "0.05",
        "--lambda",
        "0.1",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = bin(&[
        "example",
        "example2",
        "--eta",
        "0.5",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("0.20859"), "{}", stderr(&o));
    let o = bin(&[
        "example",
        "example1",
        "--c",
        "0.2",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(stderr(&o).contains("0.0982"), "{}", stderr(&o));
}

#[test]
fn gevrey_command_writes_fits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ex1.toml", EX1);
    let o = bin(&[
        "gevrey",
        "--config",
        &cfg,
        "--d-list",
        "0.5,-0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&dir.path().join("gevrey.json"));
    assert_eq!(v["fits"].as_array().unwrap().len(), 2);
    let o = bin(&[
        "gevrey",
        "--config",
        &cfg,
        "--d",
        "-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
