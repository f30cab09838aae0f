use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn hardy(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hardy"));
    cmd.args(args).env_remove("HILBERT_CONFIG");
    if let Some(path) = config {
        cmd.env("HILBERT_CONFIG", path);
    }
    cmd.output().expect("the binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Header comments and data rows of a CSV artifact.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let comments = text.lines().filter(|l| l.starts_with('#')).map(str::to_string).collect();
    let rows = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect();
    (comments, rows)
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn table1_matches_the_published_first_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("table1.csv");
    let out = hardy(&["table1", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (comments, rows) = read_csv(&path);
    assert!(comments.iter().any(|c| c.starts_with("# seed: ")));
    assert_eq!(rows[0], ["n", "|c1|", "|c2|", "|c3|"]);
    assert_eq!(rows.len(), 10);
    let row1: Vec<f64> = rows[2][1..].iter().map(|s| f(s)).collect();
    for (got, want) in row1.iter().zip([0.7577, 0.6346, 0.1520]) {
        assert!((got - want).abs() <= 1e-3, "{row1:?}");
    }
    let last: Vec<f64> = rows[9][1..].iter().map(|s| f(s)).collect();
    assert!((last[0] - 0.9999).abs() <= 1e-3 && (last[1] - 0.0142).abs() <= 1e-3);
}

#[test]
fn check_examples() {
    let out = hardy(&["check", "--poly", "z1^3+z2^3+z1*z2*z3", "--p", "4", "--exact"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"], "hilbert-point");
    assert_eq!(v["result"]["residual"], 0.0);
    assert_eq!(v["result"]["lambda_expected"], 5.0);

    let out = hardy(&["check", "--poly", "z1+z2", "--p", "inf"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"], "hilbert-point");
    assert_eq!(v["result"]["method"], "infinity-closed-form");

    // unequal moduli fail at p = 3, and a CSV coefficient list is accepted
    let out = hardy(&["check", "--poly", "0.8,0.6", "--p", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["verdict"], "not-hilbert-point");
}

#[test]
fn inconclusive_and_error_exit_codes() {
    let out = hardy(&["check", "--poly", "z1+2*z2^2", "--p", "3"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["result"]["verdict"], "inconclusive");
    assert!(stderr(&out).contains("inconclusive"));

    let out = hardy(&["check", "--poly", "z1 +* z2", "--p", "3"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("column 5"), "{}", stderr(&out));

    let out = hardy(&["check", "--poly", "z1 + z2^-1", "--p", "3"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("negative exponents"));

    let out = hardy(&["phi", "--p", "3", "--bogus"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = hardy(&["nonsense"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = hardy(&["phi"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing --p"));
    let out = hardy(&["khintchin", "--p", "3", "--d-max", "9"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("budget"), "{}", stderr(&out));
    let out = hardy(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn experiment_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let args = ["experiment", "--d", "2", "--p", "1.5", "--trials", "4", "--seed", "9", "--max-iters", "200", "--out"];
        let out = hardy(&[&args[..], &[path.to_str().unwrap()]].concat(), None);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["meta"]["seed"], 9);
    assert_eq!(v["result"]["trials"], 4);
    assert_eq!(v["result"]["classifications"]["single-coordinate-limit"], 4);
    // the hash is SHA-256 of the compact, key-sorted configuration
    let digest: String = Sha256::digest(v["meta"]["config"].to_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(v["meta"]["config_hash"], digest.as_str());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("hilbert.conf");
    std::fs::write(&cfg, "# quadrature\ntol = 1e-4\nangular = 64\np = 5\n").unwrap();
    let out = hardy(&["phi", "--tol", "1e-7"], Some(&cfg));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["meta"]["config"]["quadrature"]["target_tol"], 1e-7);
    assert_eq!(v["meta"]["config"]["quadrature"]["angular_points"], 64);
    assert_eq!(v["meta"]["config"]["params"]["p"], 5.0);
    assert_eq!(v["result"]["method"], "bergman");
    assert_eq!(v["result"]["status"], "theorem");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let out = hardy(&["phi", "--p", "3"], Some(&cfg));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown key"));
}

#[test]
fn phi_values_carry_labels() {
    let out = hardy(&["phi", "--p", "6"], None);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["value"], 2.0);
    assert_eq!(v["result"]["exact"], "2");
    assert_eq!(v["result"]["status"], "exact");
    let out = hardy(&["phi", "--p", "3"], None);
    let v = stdout_json(&out);
    assert!(v["result"]["value"].as_f64().unwrap() < 0.0);
    assert_eq!(v["result"]["status"], "conjecture");
    assert!(v["meta"]["notes"][0].as_str().unwrap().contains("conjecture"));
}

#[test]
fn phi_curve_csv_layout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("phi.csv");
    let out = hardy(&["phi-curve", "--min", "1", "--max", "5", "--step", "0.5", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (comments, rows) = read_csv(&path);
    assert!(comments.iter().any(|c| c.contains("conjecture")));
    assert_eq!(rows[0], ["p", "value", "error", "method"]);
    for row in &rows[1..] {
        let (p, v, e) = (f(&row[0]), f(&row[1]), f(&row[2]));
        if p < 2.0 || p > 4.0 {
            assert!(v > e, "p = {p}");
        } else if p > 2.0 && p < 4.0 {
            assert!(v < -e, "p = {p}");
        }
    }
}

#[test]
fn figure2_has_a_bergman_tail() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("fig.csv");
    let out = hardy(&["figure2", "--step", "0.5", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (_, rows) = read_csv(&path);
    let ps: Vec<f64> = rows[1..].iter().map(|r| f(&r[0])).collect();
    assert_eq!((ps[0], *ps.last().unwrap()), (1.0, 8.0));
    for row in &rows[1..] {
        let p = f(&row[0]);
        assert_eq!(row[3], if p > 4.0 { "bergman" } else { "torus-quadrature" }, "p = {p}");
        if p > 4.0 {
            assert!(f(&row[1]) > 0.0);
        }
    }
    let at8 = rows.iter().find(|r| r[0] == "8.0").unwrap();
    assert!((f(&at8[1]) - 30.0).abs() < 1e-5);
}

#[test]
fn khintchin_table_at_p_four() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("k.csv");
    let out = hardy(&["khintchin", "--p", "4", "--d-max", "10", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (_, rows) = read_csv(&path);
    assert_eq!(rows[0], ["d", "norm", "bound", "gap"]);
    assert_eq!(rows.len(), 11);
    let mut prev_gap = f64::INFINITY;
    for row in &rows[1..] {
        let d = f(&row[0]);
        let norm = f(&row[1]);
        assert!((norm.powi(4) - (2.0 - 1.0 / d)).abs() < 1e-14);
        assert!((f(&row[2]) - 2f64.powf(0.25)).abs() < 1e-14);
        assert!(f(&row[3]) < prev_gap);
        prev_gap = f(&row[3]);
    }
}

#[test]
fn fourier_outputs() {
    let out = hardy(&["fourier", "--d", "2", "--p", "3", "--alpha", "1,0"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let c = v["result"]["entries"][0]["value"].as_f64().unwrap();
    assert!((c - 16.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);

    let out = hardy(&["fourier", "--d", "3", "--p", "3", "--alpha", "-1,-1,3", "--tol", "1e-9"], None);
    let v = stdout_json(&out);
    let phi = hardy(&["phi", "--p", "3", "--tol", "1e-9"], None);
    let w = stdout_json(&phi);
    let a = v["result"]["entries"][0]["value"].as_f64().unwrap();
    assert!((a - w["result"]["value"].as_f64().unwrap()).abs() < 1e-12);

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("c4.csv");
    let out = hardy(&["fourier", "--d", "3", "--p", "4", "--range", "1", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_csv(&path);
    assert_eq!(rows[0], ["alpha1", "alpha2", "alpha3", "value"]);
    let get = |a: [&str; 3]| rows.iter().find(|r| r[..3] == a).map(|r| r[3].clone());
    assert_eq!(get(["1", "0", "0"]).as_deref(), Some("5"));
    assert_eq!(get(["1", "1", "-1"]).as_deref(), Some("2"));
    assert_eq!(get(["2", "-1", "0"]).as_deref(), Some("1"));

    let out = hardy(&["fourier", "--d", "3", "--p", "3", "--alpha", "1,1,1"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn project_exact_and_quadrature_agree() {
    let out = hardy(&["project", "--coeffs", "1,2,(1/2)", "--p", "4", "--even-exact"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let exact = stdout_json(&out);
    let out = hardy(&["project", "--coeffs", "1,2,0.5", "--p", "4", "--tol", "1e-11"], None);
    let quad = stdout_json(&out);
    let ex = exact["result"]["output"].as_array().unwrap();
    let qu = quad["result"]["output"].as_array().unwrap();
    assert_eq!(ex.len(), 3);
    // ‖c‖² = 21/4; the j-th output is c_j(2‖c‖² − |c_j|²)
    assert_eq!(ex[0]["re"], "19/2");
    for (e, q) in ex.iter().zip(qu) {
        let r: Vec<f64> = e["re"].as_str().unwrap().split('/').map(f).collect();
        let r = if r.len() == 2 { r[0] / r[1] } else { r[0] };
        assert!((r - q["re"].as_f64().unwrap()).abs() < 1e-8, "{e} vs {q}");
    }
    assert_eq!(exact["result"]["ij"], Value::Null);
    assert_eq!(quad["result"]["ij"]["values"].as_array().unwrap().len(), 3);
    let out = hardy(&["project", "--coeffs", "1,1", "--p", "3", "--even-exact"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_written_atomically() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("phi.json");
    std::fs::write(&path, "stale").unwrap();
    let out = hardy(&["phi", "--p", "6", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["value"], 2.0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let missing = dir.path().join("no/such/dir/x.json");
    let out = hardy(&["phi", "--p", "6", "--out", missing.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!missing.exists());
}

#[test]
fn iterate_writes_the_trace() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("trace.json");
    let args = ["iterate", "--coeffs", "0.6,0.8*i,0.3", "--p", "3", "--max-iters", "400", "--tol", "1e-9"];
    let out = hardy(&[&args[..], &["--out", path.to_str().unwrap()]].concat(), None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let r = &v["result"];
    assert_eq!(r["p"], 3.0);
    assert_eq!(r["classification"], "equal-modulus-limit");
    let iterates = r["iterates"].as_array().unwrap();
    assert_eq!(iterates.len(), r["residuals"].as_array().unwrap().len() + 1);
    let last = iterates.last().unwrap().as_array().unwrap();
    for z in last {
        let (re, im) = (z[0].as_f64().unwrap(), z[1].as_f64().unwrap());
        assert!(((re * re + im * im).sqrt() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    }
}
