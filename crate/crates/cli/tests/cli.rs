use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tomobridge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomobridge"))
        .args(args)
        .current_dir(dir)
        .env("NO_COLOR", "1")
        .output()
        .expect("spawn tomobridge")
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = tomobridge(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn state_commands_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["state", "paper", "--j", "1", "--out", "s.json"], d);
    let s = json(&d.join("s.json"));
    assert_eq!(s["basis"], "spin");
    assert_eq!(s["j"], 1.0);
    assert_eq!(s["re"].as_array().unwrap().len(), 3);

    assert_eq!(tomobridge(&["state", "paper", "--j", "2"], d).status.code(), Some(2));
    assert_eq!(tomobridge(&["state", "bogus"], d).status.code(), Some(2));
    assert_eq!(tomobridge(&["tomogram", "photon", "--in", "missing.json"], d).status.code(), Some(2));

    ok(&["state", "random", "--j", "3/2", "--seed", "7", "--out", "a.json"], d);
    ok(&["state", "random", "--j", "3/2", "--seed", "7", "--out", "b.json"], d);
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());

    ok(&["state", "file", "--in", "a.json", "--out", "c.json"], d);
    assert_eq!(json(&d.join("a.json")), json(&d.join("c.json")));
}

#[test]
fn tomograms_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["state", "paper", "--j", "1/2", "--out", "s.json"], d);
    ok(&["tomogram", "spin", "--in", "s.json", "--out", "w.json", "--csv", "w.csv"], d);
    let w = json(&d.join("w.json"));
    assert_eq!(w["kind"], "spin");
    for row in w["values"].as_array().unwrap() {
        let sum: f64 = row.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
    assert!(std::fs::read_to_string(d.join("w.csv")).unwrap().starts_with("alpha,beta,gamma,weight,m,value\n"));

    // a spin state has no CV tomogram until embedded
    assert_eq!(tomobridge(&["tomogram", "photon", "--in", "s.json"], d).status.code(), Some(2));

    // photon tomogram at alpha = 0 is the diagonal of rho
    ok(&["state", "paper", "--j", "1/2", "--embed", "--out", "e.json"], d);
    ok(&["tomogram", "photon", "--in", "e.json", "--alpha", "0", "--cutoff", "1", "--out", "p.json"], d);
    let p = json(&d.join("p.json"));
    let e = json(&d.join("e.json"));
    let row: Vec<f64> = p["values"][0].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for k in 0..4 {
        let diag = e["re"][k][k].as_f64().unwrap();
        assert!((row[k] - diag).abs() < 1e-12, "{k}: {} vs {diag}", row[k]);
    }

    // vacuum quadrature column is the Gaussian exp(-x^2)/sqrt(pi)
    ok(&["state", "fock", "--n", "0", "--out", "v.json"], d);
    ok(&["tomogram", "symplectic", "--in", "v.json", "--mu", "1", "--nu", "0", "--x", "-2:2:0.5", "--out", "q.json"], d);
    let q = json(&d.join("q.json"));
    for (k, v) in q["values"].as_array().unwrap().iter().enumerate() {
        let x = -2.0 + 0.5 * k as f64;
        let expect = (-x * x).exp() / std::f64::consts::PI.sqrt();
        assert!((v.as_f64().unwrap() - expect).abs() < 1e-12);
    }
}

#[test]
fn transforms_carry_metadata_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["state", "paper", "--j", "1", "--out", "s.json"], d);
    ok(&["tomogram", "spin", "--in", "s.json", "--out", "w.json"], d);
    let args = ["transform", "spin-to-photon", "--in", "w.json", "--alpha-diag", "0,0.5,1.0,1.5"];
    ok(&[&args[..], &["--out", "p1.json"]].concat(), d);
    ok(&[&args[..], &["--out", "p2.json"]].concat(), d);
    assert_eq!(std::fs::read(d.join("p1.json")).unwrap(), std::fs::read(d.join("p2.json")).unwrap());
    let p = json(&d.join("p1.json"));
    assert_eq!(p["restricted"]["j"], 1.0);
    assert_eq!(p["restricted"]["normalization"], "raw");
    assert_eq!(p["provenance"]["direction"], "spin-to-photon");
    assert_eq!(p["alphas"].as_array().unwrap().len(), 4);

    ok(&["transform", "spin-to-symplectic", "--in", "w.json", "--mu", "1", "1", "--nu", "1", "1", "--x", "-1:1:0.5", "--out", "y.json"], d);
    let y = json(&d.join("y.json"));
    assert_eq!(y["values"].as_array().unwrap().len(), 25);

    // wrong input kind
    assert_eq!(tomobridge(&["transform", "photon-to-spin", "--in", "w.json", "--j", "1"], d).status.code(), Some(2));
}

#[test]
fn symplectic_to_photon_on_vacuum_is_poissonian() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["state", "fock", "--n", "0", "--out", "v.json"], d);
    ok(&["tomogram", "symplectic", "--in", "v.json", "--optical", "16", "--x", "-8:8:0.05", "--out", "o.json"], d);
    ok(&["transform", "symplectic-to-photon", "--in", "o.json", "--alpha", "0.5,0", "--cutoff", "5", "--out", "p.json"], d);
    let p = json(&d.join("p.json"));
    let mut fact = 1.0;
    for (n, v) in p["values"][0].as_array().unwrap().iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let expect = (-0.25f64).exp() * 0.25f64.powi(n as i32) / fact;
        assert!((v.as_f64().unwrap() - expect).abs() < 1e-8);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"seed": 11, "x_grid": [-1.0, 1.0, 1.0]}"#).unwrap();
    ok(&["--config", "cfg.json", "state", "random", "--j", "1", "--out", "a.json"], d);
    ok(&["state", "random", "--j", "1", "--seed", "11", "--out", "b.json"], d);
    ok(&["--config", "cfg.json", "state", "random", "--j", "1", "--seed", "3", "--out", "c.json"], d);
    assert_eq!(json(&d.join("a.json")), json(&d.join("b.json")));
    assert_ne!(json(&d.join("a.json")), json(&d.join("c.json")));

    ok(&["state", "fock", "--n", "1", "--out", "f.json"], d);
    ok(&["--config", "cfg.json", "tomogram", "symplectic", "--in", "f.json", "--out", "t.json"], d);
    assert_eq!(json(&d.join("t.json"))["values"].as_array().unwrap().len(), 3);
    ok(&["--config", "cfg.json", "tomogram", "symplectic", "--in", "f.json", "--x", "-1:1:0.5", "--out", "t.json"], d);
    assert_eq!(json(&d.join("t.json"))["values"].as_array().unwrap().len(), 5);

    std::fs::write(d.join("bad.json"), r#"{"nonsense": true}"#).unwrap();
    assert_eq!(tomobridge(&["--config", "bad.json", "state", "paper", "--j", "1"], d).status.code(), Some(2));
}

#[test]
fn verify_filters_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(&["verify", "--only", "photon-to-symplectic", "--json"], d);
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|r| r["pass"] == true && r["transform"] == "photon_to_symplectic"));

    let strict = tomobridge(&["verify", "--only", "photon-to-symplectic", "--tolerance", "0"], d);
    assert_eq!(strict.status.code(), Some(3));
    let text = String::from_utf8(strict.stdout).unwrap();
    assert!(text.contains("FAIL") && !text.contains('\x1b'));

    assert_eq!(tomobridge(&["verify", "--only", "nothing"], d).status.code(), Some(2));
}

#[test]
fn reproduce_with_zero_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tomobridge(&["reproduce", "fig4", "--out-dir", "o", "--tolerance", "0"], d);
    assert_eq!(out.status.code(), Some(3));
    let out = ok(&["reproduce", "fig4", "--out-dir", "o"], d);
    assert!(String::from_utf8(out.stdout).unwrap().contains("3 of 3 checks passed"));
    let table = std::fs::read_to_string(d.join("o/fig4/tables.csv")).unwrap();
    // 4 amplitudes x (2 + 3 + 4) sector labels
    assert_eq!(table.lines().count(), 1 + 4 * 9);
}
