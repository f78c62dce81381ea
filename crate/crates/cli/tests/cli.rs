use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn yanglee(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yanglee"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = yanglee(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn polynomial_rows() {
    assert_eq!(stdout(&["xxz-poly", "--L", "4"]), "exponent,coefficient\n0,2\n3,2\n4,1\n");
}

#[test]
fn chi_example() {
    let r = rows(&stdout(&["ssh-chi", "--u", "1", "--v", "1", "--w", "1", "--beta", "100"]));
    assert_eq!(r[0], ["beta", "chi", "formula", "ratio"]);
    assert_eq!(r[1][1], "16");
    let formula: f64 = r[1][2].parse().unwrap();
    let ratio: f64 = r[1][3].parse().unwrap();
    assert!((formula - 15.92).abs() < 5e-3);
    assert!((ratio - 1.005).abs() < 5e-4);
}

#[test]
fn manifest_lists_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sbae.csv");
    let man = dir.path().join("run.json");
    let status = yanglee(&[
        "xxz-sbae",
        "--L",
        "6",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "--manifest",
        man.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let m = manifest(&man);
    assert_eq!(m["command"], "xxz-sbae");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["parameters"]["L"], 6);
    assert!(m["wall_time"].as_f64().unwrap() >= 0.0);
    assert!(m["versions"].as_str().unwrap().starts_with("yanglee-cli"));
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    for o in outputs {
        assert!(fs::metadata(o.as_str().unwrap()).unwrap().len() > 0);
    }
    let table = fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().next(), Some("m,index,re_zeta,im_zeta"));
    assert_eq!(table.lines().count(), 1 + 1 + 2 + 3);
}

#[test]
fn default_manifest_beside_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("poly.csv");
    assert!(yanglee(&["xxz-poly", "--L", "5", "--out", out.to_str().unwrap()]).status.success());
    let m = manifest(&dir.path().join("poly.csv.manifest.json"));
    assert_eq!(m["summary"]["degree"], 6);
}

fn identical_runs(args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for (i, threads) in ["1", "2", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let mut full: Vec<&str> = args.to_vec();
        let out_s = out.to_str().unwrap().to_owned();
        full.extend(["--threads", threads, "--out", &out_s]);
        let o = yanglee(&full);
        assert!(o.status.success(), "{full:?}: {}", String::from_utf8_lossy(&o.stderr));
        tables.push(fs::read(&out).unwrap());
    }
    assert!(!tables[0].is_empty());
    assert_eq!(tables[0], tables[1], "{args:?} depends on --threads");
    assert_eq!(tables[0], tables[2], "{args:?} is not reproducible");
}

#[test]
fn csv_is_deterministic() {
    identical_runs(&["ssh-zeros-scan", "--nd", "24", "--nt", "6"]);
    identical_runs(&["xxz-zeros", "--L", "4", "--nx", "21", "--ny", "21"]);
    identical_runs(&["xxz-sbae", "--L", "8", "--seed", "3"]);
    identical_runs(&["ssh-ee", "--cells", "60", "--sizes", "4,6,8,12,16"]);
}

#[test]
fn json_format() {
    let text = stdout(&["xxz-poly", "--L", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["exponent"], 2);
    assert_eq!(v[1]["coefficient"], 2);
}

#[test]
fn zero_table_schema() {
    let r = rows(&stdout(&[
        "xxz-zeros", "--L", "2", "--re-min", "0.95", "--re-max", "1.1", "--im-min", "0", "--im-max", "0.1",
        "--n-max", "1",
    ]));
    assert_eq!(r[0], ["re_delta", "im_delta", "provenance", "residual"]);
    let numeric: Vec<_> = r.iter().filter(|row| row[2] == "numeric").collect();
    let analytic: Vec<_> = r.iter().filter(|row| row[2] == "analytic").collect();
    assert_eq!((numeric.len(), analytic.len()), (2, 2));
    let value = |row: &Vec<String>, i: usize| row[i].parse::<f64>().unwrap();
    for (n, a) in numeric.iter().zip(&analytic) {
        assert!(a[3].is_empty());
        assert!((value(n, 0) - value(a, 0)).abs() < 1e-8);
        assert!((value(n, 1) - value(a, 1)).abs() < 1e-8);
    }
}

#[test]
fn theorem1_table() {
    let r = rows(&stdout(&["xxz-verify-theorem1", "--L", "4", "--beta", "100", "--J", "1"]));
    assert_eq!(r[0], ["n", "re_analytic", "im_analytic", "re_numeric", "im_numeric", "distance"]);
    assert_eq!(r.len(), 1 + 4);
    assert!(r[1..].iter().all(|row| row[5].parse::<f64>().unwrap() < 5e-3));
}

#[test]
fn help_documents_schema() {
    let text = stdout(&["xxz-zeros", "--help"]);
    assert!(text.contains("re_delta,im_delta,provenance,residual"));
    let text = stdout(&["ssh-zeros-scan", "--help"]);
    assert!(text.contains("w_minus_v,T,has_zeros,chi"));
}

#[test]
fn exit_codes() {
    assert_eq!(yanglee(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(yanglee(&["xxz-poly", "--L", "4", "--bogus"]).status.code(), Some(1));
    assert_eq!(yanglee(&["xxz-poly", "--L", "1"]).status.code(), Some(1));
    assert_eq!(yanglee(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let man = dir.path().join("fail.json");
    let o = yanglee(&["xxz-susceptibility", "--fields", "10", "--manifest", man.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&man);
    assert!(m["error"].as_str().unwrap().contains("outside"));
    assert!(m["outputs"].as_array().unwrap().is_empty());
}

#[test]
fn in_process_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gap.csv");
    let code = yanglee_cli::run([
        "yanglee",
        "xxz-gap",
        "--L",
        "4,6",
        "--re-delta=-0.02",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, yanglee_cli::EXIT_OK);
    let r = rows(&fs::read_to_string(out).unwrap());
    assert_eq!(r.len(), 3);
    for row in &r[1..] {
        assert!(row[5].parse::<f64>().unwrap() < 0.15);
    }
}
