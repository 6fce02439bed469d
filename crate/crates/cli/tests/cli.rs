use std::process::{Command, Output};

use serde_json::Value;

fn ghat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn irreps_writes_a_dual_that_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s3.json");
    let o = ghat(&["irreps", "--group", "S3", "--json", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("3 classes"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    let dual: ghat::io::DualJson = serde_json::from_value(v["dual"].clone()).unwrap();
    assert_eq!(ghat::io::dual_from_json(&dual).unwrap().num_classes(), 3);
}

#[test]
fn group_from_permutation_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d4.json");
    std::fs::write(&path, r#"{"degree": 4, "generators": [[1, 2, 3, 0], [3, 2, 1, 0]]}"#).unwrap();
    let o = ghat(&["fusion", "--group", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("4 ⊗ 4 = 0 + 1 + 2 + 3"));
}

#[test]
fn every_demo_subcommand_passes() {
    let runs: [&[&str]; 5] = [
        &["model", "--group", "Z3", "--level", "2"],
        &["crossed", "--group", "S3"],
        &["twisted", "--demo", "--group", "Z4"],
        &["double", "--group", "Z2"],
        &["cocycle-demo", "--group", "Z2"],
    ];
    for args in runs {
        let o = ghat(args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn verify_is_deterministic_and_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = ghat(&["verify", "--groups", "Z2,Z3", "--deterministic", "--json", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c.get("millis").is_none()));

    let o = ghat(&["verify", "--groups", "Z2", "--tol", "1e-17"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("tolerance-induced"));
}

#[test]
fn bad_input_exits_with_an_error() {
    let o = ghat(&["irreps", "--group", "NotAGroup"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown builtin"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"order\": 2,\n \"table\": [[0, 1]").unwrap();
    let o = ghat(&["irreps", "--group", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
