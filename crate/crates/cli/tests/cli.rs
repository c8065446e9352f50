use std::process::{Command, Output};

use serde_json::Value;

fn brauer4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brauer4")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn analyze_reports_the_obstruction() {
    let out = brauer4(&["analyze", "example:Y_13_2_6", "--samples", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["brauer"]["verdict"], "obstructed by A");
    assert_eq!(v["brauer"]["hp_obstructed_by"], serde_json::json!(["A"]));
    assert_eq!(v["local_solubility"]["everywhere_locally_soluble"], true);
    assert_eq!(v["validity"]["valid"], true);
}

#[test]
fn output_is_deterministic() {
    let args = ["analyze", "example:S_13_153_179", "--samples", "12", "--seed", "5"];
    let (a, b) = (brauer4(&args), brauer4(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn inline_and_file_specs_agree() {
    let spec = r#"{"family":"Y","p":13,"a":12,"b":1}"#;
    let path = std::env::temp_dir().join(format!("brauer4-cli-{}.json", std::process::id()));
    std::fs::write(&path, spec).unwrap();
    let inline = brauer4(&["classify", spec]);
    let file = brauer4(&["classify", path.to_str().unwrap()]);
    let named = brauer4(&["classify", "example:Y_13_12_1"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(inline.status.code(), Some(0));
    assert_eq!(inline.stdout, file.stdout);
    assert_eq!(inline.stdout, named.stdout);
    assert_eq!(json(&inline)["classification"]["certified"], true, "{}", String::from_utf8_lossy(&inline.stdout));
}

#[test]
fn rational_point_invariants_sum_to_zero() {
    let out = brauer4(&["invariants", "example:Y_13_12_1", "--point", "1:-3:2:7:16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 3);
    assert!(classes.iter().all(|c| c["sum"] == "0"));
}

#[test]
fn search_finds_the_known_point() {
    let out = brauer4(&["search", "example:Y_13_12_1", "--height", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let v = json(&out);
    let pts = v["points"].as_array().unwrap_or_else(|| panic!("{text}"));
    assert!(pts.iter().any(|p| p["point"] == serde_json::json!([1, -3, 2, 7, 16])), "{text}");
    let heights: Vec<i64> = pts.iter().map(|p| p["height"].as_i64().unwrap()).collect();
    assert!(heights.windows(2).all(|w| w[0] <= w[1]), "{heights:?}");
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["analyze", "{\"family\": \"Y\", \"p\": 13,"][..],
        &["analyze", r#"{"family":"Y","p":13,"a":5,"b":2}"#],
        &["analyze", "/nonexistent/surface.json"],
        &["analyze", "example:nope"],
        &["invariants", "example:Y_13_12_1", "--point", "1:1:1:1:1"],
        &["census", "--family", "Y", "--p-min", "50", "--p-max", "10"],
        &["analyze", "example:Y_13_2_6", "--jobs", "0"],
    ] {
        let out = brauer4(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn census_emits_json_lines() {
    let out = brauer4(&["census", "--family", "Y", "--p-max", "13", "--samples", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["rows"], 9);
    assert_eq!(lines.len(), 10);
    assert!(lines[1..].iter().all(|r| r["status"] == "pass" && r["agrees"] == true));
    let obstructed: Vec<&str> =
        lines[1..].iter().filter(|r| r["computed"] == "obstructed by A").map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(obstructed, ["Y_{5,2,2}", "Y_{13,2,6}", "Y_{13,6,2}"]);
}

#[test]
fn table_format_aligns_columns() {
    let out = brauer4(&["census", "--family", "Y", "--p-max", "5", "--samples", "16", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("rows:")).skip(1).collect();
    assert_eq!(rows.len(), 4, "{text}");
    let col = rows[0].find("id").unwrap();
    assert!(rows[1..].iter().all(|r| r[col..].starts_with("Y_{5,")), "{text}");
}

#[test]
fn built_in_examples_verify() {
    let out = brauer4(&["verify-paper", "--jobs", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    let ex = v["examples"].as_array().unwrap();
    assert_eq!(ex.len(), 5);
    assert!(ex.iter().all(|e| e["status"] == "pass"));
}
