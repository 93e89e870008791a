use std::fs;
use std::path::Path;

use cyclotorsion::cli::dispatch;
use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut v = vec!["cyclotorsion", "--out", out.to_str().unwrap()];
    v.extend_from_slice(args);
    dispatch(v)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn sl2_and_delta() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["sl2", "--lambda", "1"]), 0);
    assert_eq!(read_json(&d.path().join("sl2.json"))["order"], 6);
    assert_eq!(run(d.path(), &["delta", "--a", "1", "--bad", "0,1", "--kdeg", "1"]), 0);
    let delta = read_json(&d.path().join("delta.json"))["report"]["delta"].as_f64().unwrap();
    assert!((delta - 3.87e-5).abs() < 1e-7);
    let m = read_json(&d.path().join("manifest.json"));
    assert_eq!(m["command"], "delta");
    assert_eq!(m["results"][0]["file"], "delta.json");
}

#[test]
fn usage_errors() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["sl2", "--lambda", "1", "--frobnicate"]), 2);
    assert_eq!(run(d.path(), &["teleport"]), 2);
    assert_eq!(run(d.path(), &["sl2", "--lambda", "lambda+1"]), 2);
    assert_eq!(run(d.path(), &["count", "--tmax", "100"]), 3);
}

#[test]
fn search_then_certify() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("cfg.json");
    fs::write(&cfg, r#"{"n": 2, "N_max": 2, "t_max": 4}"#).unwrap();
    let out = d.path().join("out");
    assert_eq!(run(&out, &["search", "--config", cfg.to_str().unwrap()]), 0);
    let index = fs::read_to_string(out.join("index.csv")).unwrap();
    assert!(index.starts_with("# cyclotorsion/index/v1"));
    let cert = out.join("certificates/N1_e0-0_r0.json");
    assert!(cert.exists(), "{index}");

    let first = read_json(&out.join("manifest.json"))["results"].clone();
    let out2 = d.path().join("out2");
    assert_eq!(run(&out2, &["search", "--config", cfg.to_str().unwrap(), "--jobs", "2"]), 0);
    assert_eq!(read_json(&out2.join("manifest.json"))["results"], first);

    let chk = d.path().join("chk");
    assert_eq!(run(&chk, &["certify", "--file", cert.to_str().unwrap()]), 0);
    let mut c = read_json(&cert);
    c["curve_order"] = 5.into();
    c["division_identity"]["m"] = 5.into();
    let bad = d.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(run(&chk, &["certify", "--file", bad.to_str().unwrap()]), 1);
    let rep = read_json(&chk.join("certify.json"));
    let div = rep["checks"].as_array().unwrap().iter().find(|k| k["name"] == "division_identity").unwrap();
    assert_eq!(div["ok"], false);
    assert!(div["detail"].as_str().unwrap().starts_with("f_5(x0) = "));
}

#[test]
fn scheme_file_reference() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("legendre.json"), r#"{"a": "-(1+lambda)", "b": "lambda", "c": "0", "section_x": "2"}"#).unwrap();
    let cfg = d.path().join("cfg.json");
    fs::write(&cfg, r#"{"scheme": "legendre.json", "n": 1, "N_max": 4, "t_max": 8, "skip_vanishing_subsums": true}"#).unwrap();
    let out = d.path().join("out");
    assert_eq!(run(&out, &["search", "--config", cfg.to_str().unwrap()]), 0);
    let s = read_json(&out.join("search.json"));
    assert_eq!(s["certificates"], 0);
    assert_eq!(read_json(&out.join("manifest.json"))["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn analytic_commands() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["--precision-bits", "128", "periods", "--lambda", "1/2"]), 0);
    let p = read_json(&d.path().join("periods.json"));
    assert!(p["tau"][1].as_str().unwrap().starts_with("1.0000000000"));
    assert_eq!(run(d.path(), &["betti", "--lambda", "-4+4(z8+z8^7)", "--eps", "z8,-1"]), 0);
    let b = read_json(&d.path().join("betti.json"));
    assert_eq!(b["b1_rational"], "2/3");
    assert_eq!(b["a_rational"][0], "1/8");
    assert_eq!(run(d.path(), &["tuples", "--n", "2", "--nmax", "4"]), 0);
    assert_eq!(fs::read_to_string(d.path().join("tuples.csv")).unwrap().lines().count(), 12);
}
