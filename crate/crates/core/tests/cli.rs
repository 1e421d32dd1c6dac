use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn pim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pimanifold")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn example_file(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("example.pim");
    let out = pim(&["example", "--lambda", "1", "--mu", "1", "--emit", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_prints_the_summary_line() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    let out = pim(&["classify", s(&file)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out).lines().next(),
        Some("class: F4, F4': yes, para-Sasaki: yes, theta(xi) = -4")
    );
}

#[test]
fn emit_to_stdout_matches_file() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    let out = pim(&["example", "--lambda", "1", "--mu", "1", "--emit"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), std::fs::read_to_string(file).unwrap());
    assert!(stdout(&out).starts_with("pim 1\n"));
}

#[test]
fn verify_json_is_deterministic_and_reports_findings() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = pim(&["verify", s(&file), "--suite", "all", "--json", s(path)]);
        assert_eq!(code(&out), 0, "cross-check residuals must not change the exit code");
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    let reports = v["reports"].as_array().unwrap();
    let find = |id: &str| reports.iter().find(|r| r["id"] == id).unwrap();
    assert_eq!(find("thm4.2.F4")["status"], "holds");
    assert_eq!(find("thm4.5.F4")["status"], "residual");
    assert_eq!(find("thm4.5.F4")["residual"][1][2][3][4], "2");
    assert_eq!(find("cor4.6.F4.tau")["residual"], "0");
    assert_eq!(v["classification"]["theta_xi"], "-4");
    assert_eq!(v["params"]["lambda"], "1");
}

#[test]
fn params_override_declared_values() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    let out = pim(&["--param", "lambda=2/3", "connection", s(&file)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("nabla_e0 e1 = 2/3*e2 + e4"), "{}", stdout(&out));
    let out = pim(&["connection", s(&file), "--param", "nu=1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn curvature_of_the_first_natural_connection_vanishes() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    let out = pim(&["curvature", s(&file), "--connection", "fnc"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("R = 0\n") && text.contains("tau = 0\n"), "{text}");
    let lc = stdout(&pim(&["curvature", s(&file)]));
    assert!(lc.contains("rho[0,0] = -4\n") && lc.contains("tau = -4\n"), "{lc}");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let file = example_file(&dir);
    assert_eq!(code(&pim(&["validate", s(&file)])), 0);

    // φ = id on the horizontal part keeps φ² = I − η⊗ξ but has trace 4
    let bad_phi = std::fs::read_to_string(&file)
        .unwrap()
        .replace("phi[1] = e3", "phi[1] = e1")
        .replace("phi[2] = e4", "phi[2] = e2")
        .replace("phi[3] = e1", "phi[3] = e3")
        .replace("phi[4] = e2", "phi[4] = e4");
    let invalid = write(&dir, "invalid.pim", &bad_phi);
    let out = pim(&["validate", s(&invalid)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace-phi"));

    let garbled = write(&dir, "garbled.pim", "pim 1\nn = 1\nbracket[0,1] = 2*q7\n");
    let out = pim(&["classify", s(&garbled)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(code(&pim(&["verify", s(&dir.path().join("missing.pim"))])), 2);
    assert_eq!(code(&pim(&["frobnicate"])), 2);
}
