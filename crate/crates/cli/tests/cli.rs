use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn l1min(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1min"))
        .args(args)
        .current_dir(dir)
        .env_remove("L1MIN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn gen_then_solve_matches_generated_solve() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(l1min(p, &["gen", "--n", "50", "--d", "25", "--k", "3", "--seed", "11", "--noise", "0.01", "--out", "g"])
        .status
        .success());
    for f in ["A.csv", "b.csv", "x0.csv", "gen.json"] {
        assert!(p.join("g").join(f).exists(), "{f}");
    }
    let from_files =
        l1min(p, &["solve", "--algo", "ist", "--matrix", "g/A.csv", "--rhs", "g/b.csv", "--out", "f.json"]);
    let generated = l1min(
        p,
        &[
            "solve", "--algo", "ist", "--n", "50", "--d", "25", "--k", "3", "--seed", "11", "--noise", "0.01", "--out",
            "s.json",
        ],
    );
    assert!(from_files.status.success() && generated.status.success(), "{}", stderr(&generated));
    let (f, s) = (json(&p.join("f.json")), json(&p.join("s.json")));
    assert_eq!(f["x"], s["x"]);
    assert_eq!(f["objective"], s["objective"]);
    assert_eq!(f["seed"], Value::Null);
    assert_eq!(s["seed"], 11);
}

#[test]
fn result_keys_are_in_schema_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = l1min(dir.path(), &["solve", "--n", "40", "--d", "20", "--k", "2", "--out", "r.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let keys = [
        "\"algo\"",
        "\"n\"",
        "\"d\"",
        "\"lambda\"",
        "\"iterations\"",
        "\"converged\"",
        "\"wall_time_seconds\"",
        "\"x\"",
        "\"objective\"",
        "\"kkt_residual\"",
        "\"config_echo\"",
        "\"seed\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap_or_else(|| panic!("missing {k}"))).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    let v = json(&dir.path().join("r.json"));
    assert_eq!(v["algo"], "fista");
    assert_eq!(v["converged"], true);
    assert!(v["kkt_residual"].as_f64().unwrap() <= 1e-4 * v["lambda"].as_f64().unwrap());
}

#[test]
fn dimension_mismatch_names_both_shapes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("A.csv"), "1,2\n3,4\n5,6\n").unwrap();
    std::fs::write(dir.path().join("b.csv"), "1\n2\n3\n4\n").unwrap();
    let out = l1min(dir.path(), &["solve", "--matrix", "A.csv", "--rhs", "b.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("3x2") && msg.contains('4'), "{msg}");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("A.csv"), "1,2\n3,x\n").unwrap();
    std::fs::write(p.join("b.csv"), "1\n2\n").unwrap();
    let cases: [&[&str]; 5] = [
        &["solve", "--matrix", "A.csv", "--rhs", "b.csv"],
        &["solve", "--matrix", "missing.csv", "--rhs", "b.csv"],
        &["solve", "--matrix", "A.csv", "--rhs", "b.csv", "--n", "2", "--d", "2", "--k", "1"],
        &["solve"],
        &["solve", "--n", "10", "--d", "5", "--k", "2", "--unknown-flag"],
    ];
    for args in cases {
        let out = l1min(p, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    let out = l1min(p, &["solve", "--matrix", "A.csv", "--rhs", "b.csv"]);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn non_convergence_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = l1min(dir.path(), &["solve", "--n", "80", "--d", "40", "--k", "5", "--max-iter", "2", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let v = json(&dir.path().join("r.json"));
    assert_eq!(v["converged"], false);
    assert_eq!(v["iterations"], 2);
}

#[test]
fn out_dir_variable_sets_default_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_l1min"))
        .args(["solve", "--n", "30", "--d", "15", "--k", "2"])
        .current_dir(dir.path())
        .env("L1MIN_OUT_DIR", "results")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("results/result.json").exists());
}

#[test]
fn phase_output_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let base = ["phase", "--algo", "homotopy", "--n", "30", "--grid", "3x3", "--trials", "2", "--seed", "5"];
    let one = [&base[..], &["--jobs", "1", "--out", "one.csv"]].concat();
    let two = [&base[..], &["--jobs", "2", "--out", "two.csv", "--svg", "grid.svg"]].concat();
    assert!(l1min(p, &one).status.success());
    assert!(l1min(p, &two).status.success());
    let a = std::fs::read(p.join("one.csv")).unwrap();
    assert_eq!(a, std::fs::read(p.join("two.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("rho,delta,k,d,algo,trials,successes,success_rate"));
    assert_eq!(text.lines().count(), 10);
    assert!(std::fs::read_to_string(p.join("grid.svg")).unwrap().starts_with("<svg"));

    let report = l1min(p, &["report", "--input", "one.json", "--svg", "report.svg"]);
    assert!(report.status.success(), "{}", stderr(&report));
    assert!(String::from_utf8_lossy(&report.stdout).contains("success contour"));
    assert!(l1min(p, &["phase", "--jobs", "0", "--n", "10", "--grid", "2x2"]).status.code() == Some(2));
}

#[test]
fn noise_sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = l1min(
        p,
        &[
            "noise-sweep",
            "--n",
            "60",
            "--k",
            "3",
            "--values",
            "30,40",
            "--trials",
            "2",
            "--algos",
            "ist,fista",
            "--out",
            "s.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(p.join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("d,algo,trials,failures,"));
    let report = l1min(p, &["report", "--input", "s.json", "--metric", "iterations", "--svg", "s.svg"]);
    assert!(report.status.success(), "{}", stderr(&report));
    assert!(p.join("s.svg").exists());
}

#[test]
fn cab_and_align_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = l1min(
        p,
        &["cab", "--d", "80", "--n", "140", "--groups", "20", "--corruption", "0.2", "--seed", "1", "--out", "c.json"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&p.join("c.json"));
    assert_eq!(v["algo"], "homotopy");
    assert_eq!(v["group"], v["identified_group"]);
    assert_eq!(v["e"].as_array().unwrap().len(), 80);

    let out = l1min(p, &["align", "--d", "60", "--m", "5", "--seed", "2", "--out", "a.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&p.join("a.json"));
    assert_eq!(v["algo"], "palm");
    assert!(v["rel_error"].as_f64().unwrap() < 1e-2);

    std::fs::write(p.join("B.csv"), "1,0\n0,1\n").unwrap();
    std::fs::write(p.join("b.csv"), "1\n2\n").unwrap();
    let out = l1min(p, &["align", "--basis", "B.csv", "--rhs", "b.csv"]);
    assert_eq!(out.status.code(), Some(2), "square basis is rejected");
}
