use std::process::{Command, Output};

use serde_json::Value;

fn mspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mspace")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn clark_points_of_z_squared() {
    let out = mspace(&["--json", "clark", "--u", r#"{"zeros":[[0,0],[0,0]],"constant":[1,0]}"#, "--alpha", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut points: Vec<_> = v["points"].as_array().unwrap().iter().map(pair).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((points[0].0 + 1.0).abs() < 1e-12 && points[0].1.abs() < 1e-12);
    assert!((points[1].0 - 1.0).abs() < 1e-12 && points[1].1.abs() < 1e-12);
    for w in v["weights"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn toeplitz_build_of_the_shift_symbol() {
    let out = mspace(&["--json", "build-op", "--op", "tto", "--u", "z2", "--v", "z2", "--symbol", r#"{"laurent":{"1":[1,0]}}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let expected = [[(0.0, 0.0), (0.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]];
    for (i, row) in expected.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            let (a, b) = pair(&v["matrix"][i][j]);
            assert!((a - re).abs() < 1e-12 && (b - im).abs() < 1e-12, "entry ({i},{j})");
        }
    }
}

#[test]
fn classify_recognises_the_compressed_shift() {
    let out = mspace(&["--json", "classify", "--u", "z2", "--matrix", "[[[0,0],[0,0]],[[1,0],[0,0]]]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tto"]["member"], Value::Bool(true));
    assert_eq!(v["tho"]["member"], Value::Bool(false));
    assert_eq!(v["sedlock"]["membership"], "finite");
}

#[test]
fn verify_suite_is_byte_identical_across_runs() {
    let args = ["--json", "--seed", "7", "verify-suite", "--trials", "5", "--theorem", "sedlock", "--theorem", "clark"];
    let (a, b) = (mspace(&args), mspace(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["schema"], "v1");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mspace(&["nosuch"]).status.code(), Some(2));
    assert_eq!(mspace(&["build-op", "--op", "tto", "--u", "z0"]).status.code(), Some(2));
    assert_eq!(mspace(&["clark", "--u", "z2", "--alpha", "one"]).status.code(), Some(2));
    assert_eq!(mspace(&["verify-suite", "--theorem", "nothing.here"]).status.code(), Some(2));
}

#[test]
fn verification_failures_exit_one() {
    let out = mspace(&["--seed", "7", "verify-suite", "--trials", "60", "--theorem", "products.hankel-toeplitz"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL products.hankel-toeplitz"), "{text}");
}

#[test]
fn product_test_replays_a_problem_file() {
    let out = mspace(&["--json", "--seed", "7", "verify-suite", "--trials", "60", "--theorem", "products.hankel-toeplitz"]);
    let v = json(&out);
    let example = &v["checks"][0]["counterexamples"][0];
    let dir = std::env::temp_dir().join(format!("mspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    std::fs::write(&path, example["spec"].to_string()).unwrap();
    let spec = format!("@{}", path.display());
    let replayed = mspace(&["--json", "--theorem", "products.hankel-toeplitz", "product-test", "--spec", &spec]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(replayed.status.code(), Some(1));
    let r = json(&replayed);
    let (a, b) = (r["residual"].as_f64().unwrap(), example["residual"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
}
