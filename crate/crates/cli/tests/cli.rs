use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sqrect::corpus;
use sqrect::io::Input;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqrect-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p
}

fn sqrect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rectangle_doc(width: i64, height: i64) -> Value {
    let tiles: Vec<Value> = (0..width)
        .flat_map(|c| (0..height).map(move |r| serde_json::json!([c, r])))
        .collect();
    serde_json::json!({ "tiles": tiles })
}

#[test]
fn solve_rectangle() {
    let dir = scratch("rect");
    let input = write(&dir, "rect.json", &rectangle_doc(3, 2));
    let svg = dir.join("rect.svg");
    let out = sqrect(&[
        "solve",
        input.to_str().unwrap(),
        "--exact",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let doc = stdout_json(&out);
    assert!((doc["modulus"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(doc["modulus_exact"], "2/3");
    assert_eq!(doc["weights"].as_array().unwrap().len(), 6);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let out = sqrect(&[
        "solve",
        input.to_str().unwrap(),
        "--exact",
        "--normalize",
        "integer",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["weights"]
        .as_array()
        .unwrap()
        .iter()
        .all(|w| w["w_exact"] == "1"));
}

#[test]
fn solve_dumbbell_bar_is_constant() {
    let dir = scratch("diamond_dumbbell");
    let input = write(
        &dir,
        "d.json",
        &Input::Dumbbell(corpus::diamond_dumbbell()).to_json(),
    );
    let doc = stdout_json(&sqrect(&["solve", input.to_str().unwrap()]));
    let bar: Vec<f64> = doc["weights"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|w| w["tile"][1] == 0 && (0..8).contains(&w["tile"][0].as_i64().unwrap()))
        .map(|w| w["w"].as_f64().unwrap())
        .collect();
    assert_eq!(bar.len(), 8);
    assert!(bar.iter().all(|w| (w - bar[0]).abs() < 1e-12));
}

#[test]
fn output_is_deterministic() {
    let dir = scratch("det");
    let input = write(
        &dir,
        "d.json",
        &Input::Dumbbell(corpus::domino_dumbbell()).to_json(),
    );
    let a = sqrect(&["solve", input.to_str().unwrap(), "--level", "1"]);
    let b = sqrect(&["solve", input.to_str().unwrap(), "--level", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = sqrect(&["generate", "dumbbell", "--seed", "5", "--count", "3"]);
    let b = sqrect(&["generate", "dumbbell", "--seed", "5", "--count", "3"]);
    assert_eq!(stdout_json(&a).as_array().unwrap().len(), 3);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validation_errors_exit_two() {
    let dir = scratch("bad");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        sqrect(&["solve", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        sqrect(&["solve", dir.join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let disconnected = write(
        &dir,
        "two.json",
        &serde_json::json!({ "tiles": [[0, 0], [2, 0]] }),
    );
    assert_eq!(
        sqrect(&["solve", disconnected.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let rect = write(&dir, "rect.json", &rectangle_doc(2, 2));
    assert_eq!(
        sqrect(&["solve", rect.to_str().unwrap(), "--tol-kkt", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sqrect(&["verify-dumbbell", rect.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn non_convergence_exits_three() {
    let dir = scratch("iter");
    let input = write(
        &dir,
        "d.json",
        &Input::Dumbbell(corpus::diamond_dumbbell()).to_json(),
    );
    assert_eq!(
        sqrect(&["solve", input.to_str().unwrap(), "--max-iter", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn subdivide_levels() {
    let dir = scratch("sub");
    let ell = write(&dir, "ell.json", &Input::Complex(corpus::ell()).to_json());
    let count = |level: &str| {
        let doc = stdout_json(&sqrect(&[
            "subdivide",
            ell.to_str().unwrap(),
            "--level",
            level,
        ]));
        doc["tiles"].as_array().unwrap().len()
    };
    assert_eq!(count("0"), 3);
    assert_eq!(count("1"), 12);
    assert_eq!(count("3"), 192);
    let doc = stdout_json(&sqrect(&[
        "subdivide",
        ell.to_str().unwrap(),
        "--level",
        "0",
    ]));
    assert_eq!(doc, Input::Complex(corpus::ell()).to_json());
}

#[test]
fn verify_dumbbell() {
    let dir = scratch("verify");
    let diamond_dumbbell = write(
        &dir,
        "diamond_dumbbell.json",
        &Input::Dumbbell(corpus::diamond_dumbbell()).to_json(),
    );
    let doc = stdout_json(&sqrect(&[
        "verify-dumbbell",
        diamond_dumbbell.to_str().unwrap(),
    ]));
    assert_eq!(doc["passed"], true);
    assert!(doc["middle_tiles"].as_u64().unwrap() > 0);

    let bare = write(
        &dir,
        "bare.json",
        &serde_json::json!({ "bar": { "origin": [0, 0], "width": 6, "height": 1 } }),
    );
    assert!(sqrect(&["verify-dumbbell", bare.to_str().unwrap()])
        .status
        .success());

    // tilt the solved weights along the bar
    let result = stdout_json(&sqrect(&["solve", diamond_dumbbell.to_str().unwrap()]));
    let mut tilted = result.clone();
    for w in tilted["weights"].as_array_mut().unwrap() {
        let col = w["tile"][0].as_f64().unwrap();
        w["w"] = (w["w"].as_f64().unwrap() * (1.0 + 0.01 * col)).into();
    }
    let weights = write(&dir, "tilted.json", &tilted);
    let out = sqrect(&[
        "verify-dumbbell",
        diamond_dumbbell.to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn phi_commands() {
    let apply = stdout_json(&sqrect(&["phi", "apply", r#"["1","0","0"]"#]));
    assert_eq!(apply, serde_json::json!(["1/2", "1/2", "0"]));
    let mu = stdout_json(&sqrect(&["phi", "mu", "[0,0,1]"]));
    assert_eq!(mu["mu"], 2);
    let it = stdout_json(&sqrect(&["phi", "iterate", "[0,0,1]", "--times", "2"]));
    assert_eq!(it, serde_json::json!(["1/3", "1/3", "1/3"]));
    assert_eq!(sqrect(&["phi", "preimage", "[1,0]"]).status.code(), Some(2));
    let pre = stdout_json(&sqrect(&["phi", "preimage", r#"["1/2","1/2","0"]"#]));
    assert_eq!(pre, serde_json::json!(["1", "0", "0"]));
    let ext = stdout_json(&sqrect(&["phi", "extend", "[0,0,1]", "--columns", "3"]));
    assert_eq!(ext.as_array().unwrap().len(), 3);
    assert_eq!(ext[2], serde_json::json!(["1/3", "1/3", "1/3"]));
    assert_eq!(
        sqrect(&["phi", "apply", r#"["-1"]"#]).status.code(),
        Some(2)
    );
}

#[test]
fn figures_end_to_end() {
    let dir = scratch("figs");
    let out = sqrect(&[
        "figures",
        "--out",
        dir.to_str().unwrap(),
        "--max-level",
        "1",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["diamond-1.svg", "ell-0-result.json", "domino-1.json"] {
        assert!(dir.join(name).exists(), "{name}");
    }
}
