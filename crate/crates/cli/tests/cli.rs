use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrlab"))
        .args(args)
        .env_remove("CORRLAB_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn vec3(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [f(&a[0]), f(&a[1]), f(&a[2])]
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn analyze_bell() {
    let bell = fixture("bell.toml");
    let r = json(&["analyze", bell.to_str().unwrap()]);
    assert_eq!(r["command"], "analyze");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert!(r["tolerances"]["positivity"].is_number());
    let s = vec3(&r["output"]["singular_values"]);
    assert!(s.iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert!((f(&r["output"]["S_A"]) - 1.0).abs() < 1e-12);
    assert_eq!(r["input"]["state"]["name"], "Bell state (|00> + |11>)/sqrt(2)");
}

#[test]
fn analyze_product_and_x_state() {
    let r = json(&["analyze", fixture("product.json").to_str().unwrap()]);
    for row in r["output"]["C"].as_array().unwrap() {
        assert!(row.as_array().unwrap().iter().all(|x| f(x) == 0.0));
    }
    let r = json(&["analyze", fixture("x_state_jx0.1.toml").to_str().unwrap()]);
    assert!((f(&r["output"]["C"][2][2]) + 0.3125).abs() < 1e-15);
    let r = json(&["analyze", fixture("qutrit.toml").to_str().unwrap(), "--entropy", "tsallis:2"]);
    assert_eq!(r["output"]["d_A"], 3);
    assert_eq!(r["output"]["r_A"].as_array().unwrap().len(), 8);
}

#[test]
fn optimize_exact_matches_oracle_for_quadratic() {
    for name in ["x_state_jx0.325.toml", "qutrit.toml", "mixed_marginals.toml"] {
        let p = fixture(name);
        let p = p.to_str().unwrap();
        let e = json(&["optimize", p, "--entropy", "quad", "--method", "exact"]);
        let o = json(&["optimize", p, "--entropy", "quad", "--method", "oracle", "--grid", "1000"]);
        let diff = f(&e["output"]["s_min"]) - f(&o["output"]["s_min"]);
        assert!(diff.abs() < 1e-8, "{name}: {diff}");
    }
}

#[test]
fn weak_vn_on_mixed_marginal_matches_quadratic_direction() {
    let p = fixture("mixed_marginals.toml");
    let p = p.to_str().unwrap();
    let w = vec3(&json(&["optimize", p, "--entropy", "vn", "--method", "weak"])["output"]["k_opt"]);
    let e = vec3(&json(&["optimize", p, "--entropy", "quad", "--method", "exact"])["output"]["k_opt"]);
    let dot: f64 = (0..3).map(|i| w[i] * e[i]).sum();
    assert!((dot.abs() - 1.0).abs() < 1e-12);
}

#[test]
fn pure_state_has_zero_minimum() {
    let p = fixture("bell.toml");
    let p = p.to_str().unwrap();
    for (entropy, method) in [("quad", "exact"), ("vn", "oracle"), ("tsallis:1.5", "oracle")] {
        let r = json(&["optimize", p, "--entropy", entropy, "--method", method]);
        assert!(f(&r["output"]["s_min"]).abs() < 1e-10, "{entropy} {method}");
    }
    let r = json(&["optimize", p, "--entropy", "quad", "--method", "exact"]);
    assert_eq!(r["output"]["degenerate"], true);
}

#[test]
fn discord_of_bell_state() {
    let r = json(&["discord", fixture("bell.toml").to_str().unwrap()]);
    assert!((f(&r["output"]["discord"]) - 1.0).abs() < 1e-8);
    assert!((f(&r["output"]["mutual_info"]) - 2.0).abs() < 1e-12);
    let r = json(&["discord", fixture("x_state_jx0.1.toml").to_str().unwrap(), "--method", "weak"]);
    assert_eq!(r["output"]["method"], "weak-correlation");
}

#[test]
fn profile_columns_and_symmetry() {
    let p = fixture("x_state_jx0.1.toml");
    let text = ok(&["profile", p.to_str().unwrap(), "--steps", "8", "--entropy", "tsallis:1.5"]);
    let (header, rows) = csv(&text);
    assert_eq!(header, ["theta", "ds_quad", "ds_vn", "ds_vn_weak", "discord", "discord_quad", "ds_tsallis:1.5"]);
    assert_eq!(rows.len(), 9);
    for i in 0..4 {
        assert_eq!(rows[i][1..], rows[i + 4][1..]);
    }
    assert!(text.ends_with('\n') && !text.contains('\r'));

    let (_, rows) = csv(&ok(&["profile", fixture("product.json").to_str().unwrap(), "--steps", "6"]));
    for row in rows {
        assert_eq!(row[1], "0");
        assert_eq!(row[3], "0");
        assert!(row[2].parse::<f64>().unwrap().abs() < 1e-15);
    }
}

#[test]
fn scan_is_deterministic_across_jobs() {
    let args = |jobs: &'static str| {
        vec!["scan-sectors", "--r-b", "0.25", "--j-z", "-0.25", "--grid", "12", "--oracle-grid", "300", "--jobs", jobs]
    };
    let a = ok(&args("1"));
    let b = ok(&args("4"));
    assert_eq!(a, b);
    let (header, rows) = csv(&a);
    assert_eq!(header, ["r_A", "J_x", "sector", "crossover"]);
    assert_eq!(rows.len(), 144);
    assert!(rows.iter().any(|r| r[2] == "invalid"));
    assert!(rows.iter().filter(|r| r[1] == "0").all(|r| r[2] == "B" || r[2] == "invalid"));
}

#[test]
fn ellipsoid_samples() {
    let (header, rows) = csv(&ok(&["ellipsoid", fixture("bell.toml").to_str().unwrap(), "--samples", "10"]));
    assert_eq!(header, ["r1", "r2", "r3"]);
    assert_eq!(rows.len(), 20);
    for r in rows {
        let n: f64 = r.iter().map(|x| x.parse::<f64>().unwrap().powi(2)).sum();
        assert!((n - 1.0).abs() < 1e-10);
    }
    let (header, _) = csv(&ok(&["ellipsoid", fixture("qutrit.toml").to_str().unwrap(), "--samples", "3"]));
    assert_eq!(header.len(), 8);
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bell.json");
    let stdout = ok(&["analyze", fixture("bell.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["command"], "analyze");
}

#[test]
fn exit_codes() {
    let p = |n: &str| fixture(n).to_str().unwrap().to_string();
    assert_eq!(code(&["analyze", &p("malformed.toml")]), 2);
    assert_eq!(code(&["analyze", &p("two_forms.toml")]), 2);
    assert_eq!(code(&["analyze", &p("missing.toml")]), 2);
    assert_eq!(code(&["analyze", &p("bell.toml"), "--entropy", "renyi"]), 2);
    assert_eq!(code(&["optimize", &p("bell.toml"), "--entropy", "vn", "--method", "exact"]), 2);
    assert_eq!(code(&["analyze", &p("not_positive.toml")]), 3);
    assert_eq!(code(&["optimize", &p("pure_marginal.toml"), "--method", "weak"]), 4);
    assert_eq!(code(&["profile", &p("qutrit.toml")]), 2);
    assert_eq!(code(&["scan-sectors", "--r-b", "1.5", "--j-z", "0"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn loose_positivity_tolerance_accepts_state() {
    // smallest eigenvalue of this X state is -0.125
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.toml");
    std::fs::write(&path, "[x_state]\nr_A = 0.0\nr_B = 0.0\nJ_x = 0.5\nJ_y = 0.5\nJ_z = 0.5\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&["analyze", p]), 3);
    assert_eq!(code(&["analyze", p, "--tol-positivity", "0.2"]), 0);
}
