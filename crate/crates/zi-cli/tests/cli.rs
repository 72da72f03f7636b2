use serde_json::Value;
use std::process::{Command, Output};
use zeta_interp::analytic_nt::ZeroTable;
use zeta_interp::qseries::FracPowerSeries;

fn zi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zi")).args(args).env_remove("ZI_CACHE_DIR").output().expect("run zi")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json")
}

fn scratch(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("zi_cli_{}_{name}", std::process::id()))
}

#[test]
fn zeros_count() {
    let v = json(&zi(&["zeros", "--count", "30"]));
    assert_eq!(v["cmd"], "zeros");
    let r = v["results"].as_array().unwrap();
    assert_eq!(r.len(), 30);
    assert!((r[0].as_f64().unwrap() - 14.134725).abs() < 1e-6);
    assert_eq!(v["envelopes"].as_array().unwrap().len(), 30);
    for key in ["params", "time_ms", "version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn zeros_file_and_cache() {
    let dir = scratch("cache");
    let out = scratch("zeros.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_zi"))
        .args(["zeros", "--upto", "50", "--out", out.to_str().unwrap()])
        .env("ZI_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let t = ZeroTable::read(&out).unwrap();
    assert_eq!(t.len(), 10);
    assert!(dir.join("zeros.txt").exists());
    std::fs::remove_file(&out).ok();
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn alpha_weight_two() {
    let v = json(&zi(&["alpha", "--n", "1", "--k", "2", "--sign", "minus", "--s", "1"]));
    let x = v["results"][0]["re"].as_f64().unwrap();
    assert!((x - 25.13274122871834).abs() < 1e-9, "{x}");
    assert!(v["envelopes"][0].as_f64().unwrap() < 1e-9);
}

#[test]
fn complex_arguments() {
    let v = json(&zi(&["alpha", "--n", "2", "--k", "0.5", "--sign", "plus", "--s", "0.3-0.5i"]));
    assert_eq!(v["params"]["s"], "0.3-0.5i");
    assert!(v["results"][0]["im"].as_f64().unwrap() != 0.0);
}

#[test]
fn kernel_closed_form() {
    let v = json(&zi(&["kernel", "--which", "A", "--w", "2", "--s", "0", "--sign", "plus"]));
    let re = v["results"][0]["value"][0].as_f64().unwrap();
    assert!((re + std::f64::consts::PI.powi(2) / 45.0).abs() < 1e-12);
    let v = json(&zi(&["kernel", "--which", "A", "--w", "0.35", "--s", "0.3", "--sign", "plus"]));
    assert_eq!(v["results"][0]["poles_nearby"].as_array().unwrap().len(), 4);
    let v = json(&zi(&["kernel", "--which", "Hchi", "--w", "0.3+1i", "--s", "0.6", "--chi", "5,0"]));
    assert!(v["results"][0]["err"].as_f64().is_some());
}

#[test]
fn qexp_dump_parses() {
    let o = zi(&["qexp", "--form", "theta", "--order", "10"]);
    assert!(o.status.success());
    let s = FracPowerSeries::parse_dump(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(s.coeffs().len(), 10);
    assert_eq!(zi(&["qexp", "--form", "lambda", "--cusp", "one", "--order", "4"]).status.code(), Some(2));
}

#[test]
fn gform_polynomial() {
    let v = json(&zi(&["gform", "--n", "0", "--k", "0.5", "--sign", "minus", "--qexp", "6"]));
    assert_eq!(v["results"][0]["j_poly"][0][1], "1");
    assert!(v["results"][0]["qexp"].as_str().unwrap().starts_with("denom=2"));
}

#[test]
fn rv_and_stats_csv() {
    let o = zi(&["rv", "--op", "value", "--n", "3", "--x", "1.7320508075688772,2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,x,value,err");
    let v: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-6);
    let o = zi(&["stats", "--y", "0.01", "--samples", "2000", "--seed", "7"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("y,estimate,stderr\n0.01,"));
}

#[test]
fn rw_check_flagship() {
    let v = json(&zi(&["rw-check", "--f", "gaussian:20", "--count", "50", "--nmax", "10000"]));
    assert!(v["results"][0]["residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn interp_at_origin() {
    let v = json(&zi(&["interp", "--f", "gaussian:20", "--z", "0", "--N", "400", "--Tk", "5"]));
    assert!(v["results"][0]["residual"].as_f64().unwrap() < 1e-8);
    let t = v["results"][0]["T"].as_f64().unwrap();
    assert!((32.0..=64.0).contains(&t));
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(zi(&["alpha", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(zi(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(zi(&["alpha", "--n", "1", "--k", "2", "--sign", "sideways", "--s", "1"]).status.code(), Some(2));
    assert_eq!(zi(&["stats", "--y", "0.7", "--samples", "100"]).status.code(), Some(2));
    assert_eq!(zi(&["verify-all", "--only", "14"]).status.code(), Some(2));
}

#[test]
fn integrity_failure_exits_three() {
    let p = scratch("bad_zeros.txt");
    std::fs::write(&p, "precision=1e-9\n21.0\n14.1\n").unwrap();
    let o = zi(&["rw-check", "--f", "gaussian:20", "--zeros", p.to_str().unwrap()]);
    std::fs::remove_file(&p).ok();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["kernel", "--which", "H", "--w", "0.3+2i", "--s", "0.6", "--no-timing"];
    let a = zi(&args);
    let b = zi(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["stats", "--y", "0.01", "--samples", "500", "--seed", "3"];
    assert_eq!(zi(&args).stdout, zi(&args).stdout);
}

#[test]
fn verify_selected_rows() {
    let o = zi(&["verify-all", "--fast", "--only", "1,10,13"]);
    let v = json(&o);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn every_subcommand_has_help() {
    for c in ["qexp", "gform", "alpha", "rv", "zeros", "kernel", "interp", "rw-check", "w-basis", "stats", "verify-all"] {
        let o = zi(&[c, "--help"]);
        assert!(o.status.success(), "{c}");
        assert!(String::from_utf8(o.stdout).unwrap().lines().next().unwrap().len() > 20, "{c}");
    }
}
