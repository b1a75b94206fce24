use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyshape")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn failure(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stderr).expect("json error object")
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hawaiian_ladder_thresholds() {
    let r = report(&["approximate", "--corpus", "hawaiian", "--levels", "3"]);
    let eps: Vec<&Value> = r["levels"].as_array().unwrap().iter().map(|l| &l["epsilon"]).collect();
    assert_eq!(eps[0], &json!({"rational": "2", "sqrt2_multiple": true}));
    assert_eq!(eps[1], &json!({"rational": "1/8", "sqrt2_multiple": true}));
    assert_eq!(eps[2], &json!({"rational": "1/64", "sqrt2_multiple": true}));
}

#[test]
fn two_points_with_a_large_first_epsilon_keep_one_centre() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "two.json", &json!({"points": [["0"], ["1"]]}));
    let r = report(&["approximate", "--input", &input, "--eps1", "2"]);
    assert_eq!(r["levels"][0]["subset"], json!([0]));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"points\": [").unwrap();
    let e = failure(&["approximate", "--input", path.to_str().unwrap(), "--eps1", "1"], 2);
    assert_eq!(e["error"], "parse");
    assert!(e["detail"].is_string());
}

#[test]
fn asymmetric_matrix_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "m.json", &json!({"distance_matrix": [["0", "1"], ["2", "0"]]}));
    assert_eq!(failure(&["approximate", "--input", &input, "--eps1", "1"], 2)["error"], "input");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(failure(&["homology"], 2)["error"], "usage");
    assert_eq!(failure(&["homology", "--corpus", "point", "--complex", "alpha"], 2)["error"], "input");
    assert_eq!(failure(&["frobnicate"], 2)["error"], "usage");
}

#[test]
fn exhausted_budget_exits_three() {
    let e = failure(&["homology", "--corpus", "hawaiian", "--levels", "3", "--max-simplices", "10"], 3);
    assert_eq!(e["error"], "budget");
}

#[test]
fn point_homology_is_trivial() {
    let r = report(&["homology", "--corpus", "point", "--degree", "1"]);
    for level in r["levels"].as_array().unwrap() {
        assert_eq!(level["group"], json!({"rank": 0, "torsion": []}));
    }
}

#[test]
fn dowker_sides_agree_on_the_hawaiian_levels() {
    let groups = |side| {
        let r = report(&["homology", "--corpus", "hawaiian", "--levels", "3", "--complex", side]);
        r["levels"].as_array().unwrap().iter().map(|l| l["group"].clone()).collect::<Vec<_>>()
    };
    assert_eq!(groups("dowker-upper"), groups("dowker-lower"));
}

#[test]
fn circle_tower_has_trivial_errors() {
    let r = report(&["persist", "--corpus", "circle", "--complex", "mccord"]);
    let level = &r["levels"][0];
    assert_eq!(level["H_n"], json!({"rank": 1, "torsion": []}));
    for stage in level["stages"].as_array().unwrap() {
        assert_eq!(stage["E_nm"], json!({"rank": 0, "torsion": []}));
    }
}

#[test]
fn solenoid_persistence_torsion() {
    let r = report(&["persist", "--corpus", "solenoid", "--level", "1", "--horizon", "6"]);
    let torsion: Vec<Value> = r["levels"][0]["stages"].as_array().unwrap().iter().map(|s| s["E_nm"]["torsion"].clone()).collect();
    assert_eq!(torsion, vec![json!([2]), json!([4]), json!([8]), json!([16]), json!([32])]);
    assert_eq!(r["levels"][0]["ml_index"], Value::Null);
}

#[test]
fn corrupted_ladder_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let mut ladder = report(&["approximate", "--corpus", "circle"]);
    ladder["levels"][1]["epsilon"] = json!({"rational": "1/2", "sqrt2_multiple": false});
    let path = write(dir.path(), "ladder.json", &ladder);
    let out = run(&["verify", "--input", &path]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["ladder"]["valid"], false);
    assert_eq!(r["passed"], false);
    // other commands refuse the same file as input
    assert_eq!(failure(&["homology", "--input", &path], 2)["error"], "input");
}

#[test]
fn point_verification_passes_vacuously() {
    let r = report(&["verify", "--corpus", "point"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["towers"].as_array().unwrap().len(), 6);
}

#[test]
fn build_reports_complexes_and_vertex_maps() {
    let r = report(&["build", "--corpus", "circle", "--complex", "rips"]);
    let levels = r["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[0]["counts"][0], 12);
    assert_eq!(r["bondings"][0]["assignment"].as_array().unwrap().len(), 12);
}

#[test]
fn corpus_files_round_trip_through_approximate() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    let ladder = dir.path().join("ladder.json");
    let out = run(&[
        "corpus", "--corpus", "hawaiian", "--levels", "2",
        "--out", space.to_str().unwrap(), "--ladder-out", ladder.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let cloud: Value = serde_json::from_str(&fs::read_to_string(&space).unwrap()).unwrap();
    assert!(cloud["points"].is_array());
    let again = run(&["approximate", "--input", ladder.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), fs::read_to_string(&ladder).unwrap());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["homology", "--corpus", "hawaiian", "--levels", "3", "--complex", "witness"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
