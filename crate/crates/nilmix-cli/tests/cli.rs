//! End-to-end runner checks: reproducibility, exit-code taxonomy, output
//! formats.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nilmix")
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_to(dir: &Path, command: &str, config: &Path, out: &str) -> (std::process::ExitStatus, PathBuf) {
    let out_path = dir.join(out);
    let status = Command::new(bin())
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(&out_path)
        .status()
        .expect("spawn nilmix");
    (status, out_path)
}

#[test]
fn byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("cat-mix-exact.json");
    let (s1, p1) = run_to(dir.path(), "mix-exact", &cfg, "a.csv");
    let (s2, p2) = run_to(dir.path(), "mix-exact", &cfg, "b.csv");
    assert!(s1.success() && s2.success());
    assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());

    let cfg = repo_config("heis-mix-mc.json");
    let (s1, p1) = run_to(dir.path(), "mix-mc", &cfg, "m1.csv");
    let (s2, p2) = run_to(dir.path(), "mix-mc", &cfg, "m2.csv");
    assert!(s1.success() && s2.success());
    assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
}

#[test]
fn resolved_config_sidecar_written() {
    let dir = tempfile::tempdir().unwrap();
    let (status, out) = run_to(dir.path(), "ergodic", &repo_config("cat-ergodic.json"), "e.json");
    assert!(status.success());
    let sidecar = out.with_file_name("e.json.config.json");
    let cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(cfg["command"], "ergodic");
    assert_eq!(cfg["precision"], 128);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["ergodic"], true);
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let status = Command::new(bin())
        .arg("spectrum")
        .arg("--config")
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // schema-valid JSON with an invalid matrix also exits 2
    let bad2 = dir.path().join("bad2.json");
    std::fs::write(
        &bad2,
        r#"{"action": {"rank": 1, "generators": [[["2","0"],["0","1"]]]}}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .arg("spectrum")
        .arg("--config")
        .arg(&bad2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.json");
    // two functions with large supports and a tiny budget
    let mut coeffs = Vec::new();
    for k in -30i64..=30 {
        coeffs.push(serde_json::json!({"freq": [k, 1], "re": "1", "im": "0"}));
        coeffs.push(serde_json::json!({"freq": [-k, -1], "re": "1", "im": "0"}));
    }
    let f = serde_json::json!({"dim": 2, "coeffs": coeffs, "tail": "0"});
    let doc = serde_json::json!({
        "action": {"rank": 1, "generators": [[["2","1"],["1","1"]]]},
        "functions": [f, f, f],
        "sweep": [{"separation": 1, "z_list": [[0],[1],[2]]}],
        "budget": 10,
    });
    std::fs::write(&cfg, serde_json::to_string(&doc).unwrap()).unwrap();
    let status = Command::new(bin())
        .arg("mix-exact")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn cocycle_roundtrip_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (status, out) = run_to(dir.path(), "cocycle", &repo_config("t3-cocycle.json"), "c.json");
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["constants"][0], "3/4");
    assert_eq!(doc["constants"][1], "-1/6");
    assert_eq!(doc["sigma_squared"], "0");
    assert!(doc["falsification"].is_null());
    assert_eq!(doc["solution_space"][0]["match"], true);
}

#[test]
fn anosov_witness_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("minus.json");
    std::fs::write(
        &cfg,
        r#"{"action": {"rank": 1, "generators": [[["-1","0"],["0","-1"]]]}, "z": [1]}"#,
    )
    .unwrap();
    let out = dir.path().join("a.json");
    let status = Command::new(bin())
        .arg("anosov")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["anosov"], false);
    assert_eq!(doc["witness_factor"], serde_json::json!(["1", "1"]));
}
