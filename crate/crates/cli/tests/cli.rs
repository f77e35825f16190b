use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(args)
        .env_remove("CONECALC_SEED")
        .output()
        .expect("spawn conecalc")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn classify_boundary_vector() {
    let out = run(&["classify", "--scenario", "flat:3,2", "--point", "0,0,0", "--vector", "1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "conecalc/1");
    assert_eq!(v["class"], "FutureBoundary");
}

#[test]
fn negative_coordinates_parse() {
    let out = run(&["classify", "--scenario", "flat:2,1", "--point", "-0.5,-1", "--vector", "-1,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["class"], "PastTimelike");
}

#[test]
fn distance_pure_space_pair() {
    let out = run(&[
        "distance", "--scenario", "flat:2,1", "--tau", "T", "--p", "0,0", "--q", "0,1", "--h", "0.25", "--r", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["exact"], false);
    assert_eq!(v["grid"]["h"], 0.25);
    let witness = v["witness"].as_array().unwrap();
    assert_eq!(witness.first().unwrap(), &serde_json::json!([0.0, 0.0]));
    assert_eq!(witness.last().unwrap(), &serde_json::json!([0.0, 1.0]));
}

#[test]
fn distance_oracle_mode() {
    let out = run(&["distance", "--scenario", "minkowski:1", "--p", "0,0", "--q", "1,3", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], 3.0);
    assert_eq!(v["exact"], true);
    let out = run(&["distance", "--scenario", "flat:3,2", "--p", "0,0,0", "--q", "0,0,1", "--oracle"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreachable_is_a_computational_error() {
    // With radius 1 no stencil step jumps over the removed x = 0 column.
    let out = run(&[
        "distance", "--scenario", "punctured:1", "--p", "0,-1", "--q", "0,1", "--h", "0.25", "--r", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["value"], "unreachable");
    assert!(v["witness"].as_array().unwrap().is_empty());
}

#[test]
fn degenerate_tau_suite() {
    let out = run(&["--no-timestamp", "suite", "--name", "degenerate_tau", "--k", "1", "--jmax", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let j10 = checks.iter().find(|c| c["id"] == "k1_j10").unwrap();
    assert_eq!(j10["expected"], 0.0025);
}

#[test]
fn suite_seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(["--no-timestamp", "suite", "--name", "steepness", "--samples", "50"])
        .env("CONECALC_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 7);
    let out = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(["--no-timestamp", "suite", "--name", "steepness", "--samples", "50", "--seed", "9"])
        .env("CONECALC_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 9);
    let out = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(["suite", "--name", "steepness"])
        .env("CONECALC_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["classify", "--scenario", "nowhere", "--point", "0", "--vector", "0"][..],
        &["classify", "--scenario", "flat:2,1", "--point", "0,x", "--vector", "1,0"][..],
        &["distance", "--scenario", "flat:2,1", "--tau", "T^2", "--p", "0,0", "--q", "0,1"][..],
        &["frobnicate"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn computational_errors_exit_1_with_json() {
    let cases: [&[&str]; 4] = [
        &["classify", "--scenario", "flat:2,1", "--point", "0,0,0", "--vector", "1,0"],
        &["classify", "--scenario", "punctured:1", "--point", "0,0", "--vector", "1,0"],
        &["diamond", "--scenario", "flat:2,1", "--p", "0,0", "--q", "0.5,0", "--max-nodes", "10"],
        &["suite", "--name", "nope"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let v = json(&out);
        assert!(v["error"].is_string(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn output_is_deterministic_without_timestamp() {
    let args = ["--no-timestamp", "suite", "--name", "conformal", "--set", "h=0.25", "--set", "pairs=5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v.get("timestamp").is_none());
    assert!(v.get("elapsed_ms").is_none());

    let with_time = json(&run(&["suite", "--name", "conformal", "--set", "h=0.25", "--set", "pairs=5"]));
    assert!(with_time["timestamp"].is_u64());
}

#[test]
fn diamond_csv_and_json_agree() {
    let common = ["diamond", "--scenario", "flat:2,1", "--p", "-1,0", "--q", "1,0"];
    let v = json(&run(&common));
    let count = v["count"].as_u64().unwrap() as usize;
    let out = run(&[&common[..], &["--format", "csv"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x0,x1"));
    assert_eq!(lines.count(), count);
    // The flat(2,1) diamond of (−1,0) and (1,0) at h = 0.25 is the square of
    // lattice points with |x| ≤ 1 − |t|.
    assert_eq!(count, 2 * 4 * 5 + 1);
}

#[test]
fn reach_past_of_origin() {
    let v = json(&run(&["reach", "--scenario", "flat:2,1", "--p", "0,0", "--direction", "past"]));
    assert_eq!(v["direction"], "past");
    // Past cone of the origin inside [−1,1]² at h = 0.25: Σ_{k=0}^{4} (2k+1).
    assert_eq!(v["count"], 25);
}

#[test]
fn scenario_list_flags_invalid_demo() {
    let v = json(&run(&["scenario-list"]));
    let list = v["scenarios"].as_array().unwrap();
    assert!(list.len() >= 9);
    for s in list {
        assert_eq!(s["valid"].as_bool().unwrap(), !s["expect_invalid"].as_bool().unwrap(), "{s}");
    }
    assert!(list.iter().any(|s| s["syntax"] == "notgh[:eps]"));
}

#[test]
fn export_graph_to_file() {
    let dir = std::env::temp_dir().join(format!("conecalc-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let out = run(&["export-graph", "--scenario", "torus:2,1", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&out);
    let graph: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(graph["nodes"].as_array().unwrap().len() as u64, summary["nodes"].as_u64().unwrap());
    assert_eq!(graph["edges"].as_array().unwrap().len() as u64, summary["edges"].as_u64().unwrap());
    std::fs::remove_dir_all(dir).ok();
}
