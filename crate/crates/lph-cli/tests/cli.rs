use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lph")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = lph(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

fn code(args: &[&str]) -> i32 {
    lph(args).status.code().unwrap()
}

#[test]
fn ncurv_classical() {
    let v = json(&["ncurv", "--p", "2", "--grid", "100x100x10"]);
    let sup = v["result"]["sup_estimate"].as_f64().unwrap();
    assert!((sup - 5.0).abs() < 1e-3, "{sup}");
    assert_eq!(v["result"]["verdict"]["kind"], "Satisfied");
}

#[test]
fn ncurv_diverges_beyond_two() {
    let v = json(&["ncurv", "--p", "4", "--target", "1000"]);
    assert_eq!(v["result"]["sup_estimate"], "inf");
    assert_eq!(code(&["ncurv", "--p", "4", "--expect-satisfied"]), 2);
}

#[test]
fn geodim_slope_at_four() {
    let v = json(&["geodim", "--p", "4", "--tmin", "1e-3", "--tmax", "1e-1", "--tn", "8"]);
    let slope = v["result"]["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 14.0 / 3.0).abs() < 0.05, "{slope}");
    assert_eq!(v["result"]["sweep"].as_array().unwrap().len(), 8);
}

#[test]
fn branching_certificate() {
    let v = json(&["ell1", "branch", "--t", "0.125"]);
    assert!(v["result"]["max_offaxis"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["result"]["n"], 10_000);
    assert_eq!(v["result"]["seed"], 1);
}

#[test]
fn ell1_geodesic_and_alias() {
    let v = json(&["ell1", "geodesic", "--x", "1", "--y", "1", "--z", "0"]);
    let edges = v["result"]["edges"].as_array().unwrap();
    let dirs: Vec<&str> = edges.iter().map(|e| e["dir"].as_str().unwrap()).collect();
    assert_eq!(dirs, ["+y", "+x", "+y"]);
    assert_eq!(v["result"]["length"], 2.0);
    let w = json(&["ell1", "--p", "inf", "geodesic", "--x", "2", "--y", "0", "--z", "0"]);
    assert_eq!(w["p"], "inf");
    assert_eq!(w["result"]["length"], 2.0);
    let c = json(&["ell1", "classify", "--x", "0", "--y", "0", "--z", "1"]);
    assert_eq!(c["result"]["cut_locus"], true);
    assert_eq!(c["result"]["regime"]["flags"]["axis"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["mcp-check", "--p", "2", "--n", "4.5", "--grid", "20x20x10", "--expect-satisfied"]), 2);
    assert_eq!(code(&["mcp-check", "--p", "2", "--n", "4.5", "--grid", "20x20x10"]), 0);
    assert_eq!(code(&["mcp-check", "--p", "2", "--n", "5.5", "--grid", "20x20x10", "--expect-satisfied"]), 0);
    assert_eq!(code(&["ell1", "branch", "--t", "0.2"]), 1);
    assert_eq!(code(&["ptrig", "--p", "1"]), 1);
    assert_eq!(code(&["ptrig", "--p", "0.5"]), 64);
    assert_eq!(code(&["ptrig"]), 64);
    assert_eq!(code(&["jacobian", "--p", "2", "--grid", "10y10"]), 64);
    assert_eq!(code(&["ptrig", "--p", "2", "--bogus"]), 64);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn csv_tables_carry_seventeen_digits() {
    let out = lph(&["rayplot", "--p", "1.5", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,p_val,dp_val,ratio");
    for line in lines {
        for cell in line.split(',') {
            let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{cell}");
            let x: f64 = cell.parse().unwrap();
            assert_eq!(fmt17(x), cell);
        }
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[test]
fn outputs_are_reproducible_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        let args = ["ell1", "volume", "--n", "200000", "--seed", "9", "--out", p];
        assert_eq!(code(&args), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "stray files: {names:?}");
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    let r = &v["result"];
    let (est, se, exact) = (r["estimate"].as_f64().unwrap(), r["std_error"].as_f64().unwrap(), r["analytic"].as_f64().unwrap());
    assert!((est - exact).abs() < 3.0 * se);
    // A different seed gives a different estimate.
    let other = json(&["ell1", "volume", "--n", "200000", "--seed", "10"]);
    assert_ne!(other["result"]["estimate"], r["estimate"]);
}

#[test]
fn every_table_command_runs() {
    let v = json(&["ptrig", "--p", "3", "--n", "9"]);
    for row in v["result"]["rows"].as_array().unwrap() {
        let (c, s) = (row["cos"].as_f64().unwrap(), row["sin"].as_f64().unwrap());
        assert!((c.abs().powi(3) + s.abs().powi(3) - 1.0).abs() < 1e-10);
    }
    json(&["ptrig", "--p", "3", "--series", "--n", "4"]);
    let g = json(&["geodesic", "--p", "1.5", "--theta", "0.3", "--w", "1", "--n", "5", "--ode"]);
    let path = g["result"]["path"]["samples"].as_array().unwrap();
    let ode = g["result"]["ode"].as_array().unwrap();
    let end = &path.last().unwrap()[1];
    for k in ["x", "y", "z"] {
        assert!((end[k].as_f64().unwrap() - ode.last().unwrap()[k].as_f64().unwrap()).abs() < 1e-8);
    }
    let j = json(&["jacobian", "--p", "2", "--grid", "8x8", "--nexp"]);
    assert_eq!(j["result"]["samples"].as_array().unwrap().len(), 64);
    assert!(j["result"]["min_jr"].as_f64().unwrap() > 0.0);
    let out = lph(&["jacobian", "--p", "2", "--grid", "4x4", "--nexp", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("theta,w,jr,djr_dw,n_exp\n"));
}

#[test]
fn shipped_defaults_match_the_binary() {
    let shipped: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("defaults.json")).unwrap())
            .unwrap();
    assert_eq!(json(&["defaults"])["result"], shipped);
}
