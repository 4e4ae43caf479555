use std::process::{Command, Output};

use serde_json::Value;

fn altinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| v.to_string().parse().expect("numeric"))
}

#[test]
fn eval_zeta_at_one_one_is_log_two() {
    let out = altinv(&["eval", "zeta", "--s", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((f(&v["value"]["re"]) - std::f64::consts::LN_2).abs() < 1e-14);
    assert_eq!(v["schema_version"], "1.0");
}

#[test]
fn eval_euler_is_exact_for_rationals() {
    let v = json_of(&altinv(&["eval", "euler", "--m", "3", "--x", "1/4"]));
    assert_eq!(v["exact"], "11/64");
    assert_eq!(f(&v["value"]), 11.0 / 64.0);
}

#[test]
fn eval_builtin_csc() {
    let v = json_of(&altinv(&["eval", "builtin", "--id", "csc", "--x", "1/2", "--y", "1"]));
    assert!((f(&v["value"]["re"]) - 1.0).abs() < 1e-15);
}

#[test]
fn eval_gamma_tilde_reports_sign_and_error() {
    let v = json_of(&altinv(&["eval", "gamma-tilde", "--x", "-0.5"]));
    assert_eq!(v["sign"], -1);
    assert!(f(&v["est_error"]) <= 1e-12);
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(altinv(&["eval", "zeta", "--s", "2", "--x", "-1"]).status.code(), Some(2));
    assert_eq!(altinv(&["eval", "gamma-tilde", "--x", "-2"]).status.code(), Some(2));
    assert_eq!(altinv(&["eval", "gamma-tilde", "--x", "0.5", "--tol", "1e-30"]).status.code(), Some(3));
    assert_eq!(altinv(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(altinv(&["eval", "builtin", "--id", "nope", "--x", "0", "--y", "1"]).status.code(), Some(64));
    assert_eq!(altinv(&["eval", "zeta", "--s", "2", "--x", "0.5", "--regime", "fourier"]).status.code(), Some(64));
    assert_eq!(altinv(&["verify", "zeta-identities", "--alpha", "2"]).status.code(), Some(64));
}

#[test]
fn convolve_constants_gives_two_x_minus_y() {
    let out = altinv(&["convolve", "--g", "const:1", "--h", "const:1", "--y", "1", "--x", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((f(&v["values"][0]["value"]["re"]) + 0.5).abs() < 1e-12);
}

#[test]
fn convolve_normalized_euler() {
    let out = altinv(&[
        "convolve", "--g", "euler:1", "--h", "euler:1", "--y", "1", "--x", "0.25", "--x", "-1/2", "--euler-normalized",
    ]);
    let v = json_of(&out);
    let e3 = |x: f64| x.powi(3) - 1.5 * x * x + 0.25;
    for (i, x) in [0.25, -0.5].into_iter().enumerate() {
        assert!((f(&v["values"][i]["value"]["re"]) - e3(x) / 12.0).abs() < 1e-12);
    }
}

#[test]
fn convolve_rejects_unknown_ids() {
    let out = altinv(&["convolve", "--g", "bogus", "--h", "const:1", "--y", "1", "--x", "0.25"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_euler_identities_passes() {
    let out = altinv(&["verify", "euler-identities"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(f(&v["summary"]["max_residual"]), 0.0);
}

#[test]
fn verify_invariance_all_at_uniform_tolerance() {
    let out = altinv(&["verify", "invariance-all", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["summary"]["passed"].as_u64().unwrap() > 2000);
}

#[test]
fn verify_convolution_suite_for_one_pair() {
    let out = altinv(&["verify", "convolution-theorems", "--alpha", "2", "--beta", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let zeta: Vec<&Value> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["check"].as_str().unwrap().starts_with("zeta convolution"))
        .collect();
    assert_eq!(zeta.len(), 3);
    assert!(zeta.iter().all(|e| f(&e["residual"]) <= 1e-6));
}

#[test]
fn failing_verification_still_emits_the_report() {
    let out = altinv(&["verify", "gamma-identities", "--tol", "1e-20"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn verify_output_is_deterministic() {
    let args = ["verify", "euler-identities", "--seed", "11", "--format", "csv"];
    assert_eq!(altinv(&args).stdout, altinv(&args).stdout);
    let args = ["verify", "invariance-all"];
    assert_eq!(altinv(&args).stdout, altinv(&args).stdout);
}

#[test]
fn seeds_change_the_sample() {
    let a = altinv(&["verify", "euler-identities", "--seed", "1"]).stdout;
    let b = altinv(&["verify", "euler-identities", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn csv_header_is_fixed() {
    let out = altinv(&["verify", "gamma-identities", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,n,lhs_re,lhs_im,rhs_re,rhs_im,residual,status");
}

#[test]
fn grid_file_accepts_rational_strings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    std::fs::write(&path, r#"[{"x": "1/3", "y": "1", "n": 3}, {"x": 0.25, "y": 2, "n": 5}, {"x": "-2", "y": "1", "n": 7}]"#).unwrap();
    let out = altinv(&["verify", "invariance-all", "--grid-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let xs: Vec<&str> = v["entries"].as_array().unwrap().iter().filter_map(|e| e["x"].as_str()).collect();
    assert!(xs.contains(&"1/3") && xs.contains(&"-2"));

    std::fs::write(&path, r#"[{"x": "1/3", "y": "1", "n": 4}]"#).unwrap();
    let out = altinv(&["verify", "invariance-all", "--grid-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn thread_cap_is_honoured() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_altinv"))
            .args(["verify", "zeta-identities"])
            .env("ALTINV_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, altinv(&["verify", "zeta-identities"]).stdout);
    assert_eq!(run("0").status.code(), Some(64));
}

#[test]
fn list_builtins_covers_the_registry() {
    let v = json_of(&altinv(&["list", "builtins"]));
    assert!(v["registry"].as_array().unwrap().len() >= 20);
    assert!(v["families"].as_array().unwrap().iter().any(|f| f["name"] == "gamma-log"));
}
