use std::process::Command;

use serde_json::Value;

fn chanent(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_chanent")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, out, err) = chanent(&all);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad JSON ({e}): {out}\n{err}"));
    (code, v)
}

#[test]
fn golden_units_for_k2() {
    let (code, v) = json(&["golden-units", "--max-k", "2"]);
    assert_eq!(code, 0);
    let row = &v["details"]["swap"][0];
    assert!((row["standard_robustness"].as_f64().unwrap() - 3.0).abs() < 1e-5);
    assert!((v["details"]["isotropic"][0]["isotropic_threshold"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn cost_bounds_of_swap() {
    let (code, v) = json(&["cost-bounds", "--channel", "swap2", "--eps", "0"]);
    assert_eq!(code, 0);
    let d = &v["details"];
    assert!((d["lower"].as_f64().unwrap() - 2.0).abs() < 1e-5);
    assert_eq!(d["realized"].as_f64().unwrap(), 2.0);
    assert!((d["upper"].as_f64().unwrap() - 4.0).abs() < 1e-5);
    assert_eq!(v["reports"][0]["bound_kind"], "lower-bound-via-ppt");
}

#[test]
fn inequalities_have_no_violations() {
    let (code, v) = json(&["inequalities", "--pairs", "50", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["violations"], 0);
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["robustness", "--channel", "random:2x1x1x2:3", "--seed", "5"];
    let (c1, a, _) = chanent(&[&args[..], &["--format", "json"]].concat());
    let (c2, b, _) = chanent(&[&args[..], &["--format", "json"]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("twirl.json");
    let (code, out, _) = chanent(&["twirl", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("image_rank"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["details"]["image_rank"], 4);
}

#[test]
fn certificate_verdict_sets_exit_status() {
    let (pass, v) = json(&["certify", "--superchannel", "isotropic:2:0.3", "--delta", "1", "--samples", "5"]);
    assert_eq!(pass, 0);
    assert_eq!(v["details"]["verdict"], "pass");
    let (fail, v) = json(&["certify", "--superchannel", "isotropic:2:0.3", "--delta", "0", "--samples", "5"]);
    assert_eq!(fail, 1);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_two() {
    let (code, _, err) = chanent(&["robustness", "--channel", "random:2x2:1"]);
    assert_eq!(code, 2);
    let rec: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(rec["command"], "robustness");
    assert!(rec["error"].as_str().unwrap().contains("four dimensions"));
    let (code, _, _) = chanent(&["robustness"]);
    assert_eq!(code, 2);
    let (code, _, _) = chanent(&["catalysis", "--channel", "swap2", "--l", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn channel_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sep.json");
    let ch = chanent::channel::random_separable_channel([2, 1, 1, 2], 3, 2).unwrap();
    std::fs::write(&path, ch.to_json()).unwrap();
    let (code, v) = json(&["robustness", "--channel", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["details"]["generalized"]["robustness"].as_f64().unwrap().abs() < 1e-6);
}
