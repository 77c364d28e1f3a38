use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn carnot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(format!("{name}.json"));
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = carnot(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_headers() {
    let dir = TempDir::new().unwrap();
    let gm3 = build(&dir, "gm3", &["gm", "--m", "3"]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&gm3).unwrap()).unwrap();
    assert_eq!(json["basis_labels"].as_array().unwrap().len(), 6);
    let o = carnot(&["build", "free", "--m", "3", "--step", "3"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["layer_dims"], serde_json::json!([3, 3, 8]));
    let o = carnot(&["build", "free", "--m", "2", "--step", "1"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["brackets"].as_array().map(Vec::len).unwrap_or(0), 0);
}

#[test]
fn exit_codes() {
    assert_eq!(carnot(&["build", "gm", "--m", "1"]).status.code(), Some(2));
    assert_eq!(carnot(&["build", "free", "--m", "6", "--step", "8"]).status.code(), Some(3));
    assert_eq!(carnot(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(carnot(&["validate", "/nonexistent.json"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(carnot(&["check-star", s(&bad)]).status.code(), Some(2));
}

#[test]
fn group_examples() {
    let dir = TempDir::new().unwrap();
    let gm3 = build(&dir, "gm3", &["gm", "--m", "3"]);
    let heis = build(&dir, "heis", &["gm", "--m", "2"]);
    let engel = build(&dir, "engel", &["filiform", "--step", "3"]);
    assert_eq!(stdout(&carnot(&["group", "q", s(&gm3)])).trim(), "10");
    assert_eq!(stdout(&carnot(&["group", "mul", s(&heis), "1,0,0", "0,1,0"])).trim(), "1,1,1/2");
    assert_eq!(stdout(&carnot(&["group", "dilate", s(&engel), "2", "1,1,1,1"])).trim(), "2,2,4,8");
    assert_eq!(stdout(&carnot(&["group", "inv", s(&heis), "1,2,3"])).trim(), "-1,-2,-3");
    let o = carnot(&["group", "mul", s(&heis), "1,0", "0,1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = carnot(&["group", "dinf", s(&engel), "1,1,1,1", "0,0,0,0", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["terms"][1]["power_form"], "1/16");
    assert_eq!(carnot(&["group", "dilate", s(&engel), "-1", "1,1,1,1"]).status.code(), Some(2));
}

#[test]
fn star_verdicts() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (build(&dir, "gm4", &["gm", "--m", "4"]), "star-on-basis"),
        (build(&dir, "f33", &["free", "--m", "3", "--step", "3"]), "disproved-by-condition-i"),
        (build(&dir, "contrex", &["contrex"]), "disproved-by-v3-bound"),
        (build(&dir, "ex2", &["example2", "--b", "2"]), "star-witness-found"),
    ];
    for (path, verdict) in cases {
        let o = carnot(&["check-star", s(&path), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(json["verdict"], verdict, "{}", path.display());
    }
}

#[test]
fn basis_files_and_decompose() {
    let dir = TempDir::new().unwrap();
    let ex2 = build(&dir, "ex2", &["example2", "--b", "1"]);
    let basis = dir.path().join("basis.json");
    std::fs::write(&basis, r#"{"matrix": [["1","-1","0"],["0","1","0"],["0","0","1"]]}"#).unwrap();
    let o = carnot(&["check-star", s(&ex2), "--basis", s(&basis), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["verdict"], "star-on-basis");

    let g3 = build(&dir, "g3", &["gm", "--m", "3"]);
    std::fs::write(&basis, r#"{"matrix": [["2","1","0"],["1","1","1"],["0","-1","3"]]}"#).unwrap();
    for p in ["1", "2"] {
        let o = carnot(&["decompose", s(&g3), "--basis", s(&basis), "--p", p, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(json["reconstructs"], true);
    }
}

#[test]
fn condition_i_and_quotients() {
    let dir = TempDir::new().unwrap();
    let f23 = build(&dir, "f23", &["free", "--m", "2", "--step", "3"]);
    let o = carnot(&["condition-i", s(&f23), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["holds"], true);
    let o = carnot(&["engel-quotient", s(&f23)]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["layer_dims"], serde_json::json!([2, 1, 1]));
    // killing [[X2,X1],X2] (index 4) in f23 leaves the Engel algebra
    let o = carnot(&["quotient", s(&f23), "--relation", "4:1"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["layer_dims"], serde_json::json!([2, 1, 1]));
    assert_eq!(carnot(&["quotient", s(&f23), "--relation", "9:1"]).status.code(), Some(2));
}

#[test]
fn validate_and_chio() {
    let dir = TempDir::new().unwrap();
    let g3 = build(&dir, "g3", &["gm", "--m", "3"]);
    let o = carnot(&["validate", s(&g3)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("jacobi true"));
    let o = carnot(&["chio", "2,1,3;1,4,1;0,2,5", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["equal"], true);
    assert_eq!(carnot(&["chio", "0,1;1,0"]).status.code(), Some(2));
}

#[test]
fn fields_gradient_counterexample() {
    let dir = TempDir::new().unwrap();
    let heis = build(&dir, "heis", &["gm", "--m", "2"]);
    let o = carnot(&["fields", s(&heis), "--horizontal", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
    // f = x3 has weight 2
    let poly = dir.path().join("f.json");
    std::fs::write(&poly, r#"[{"coeff": "1", "exp": [0, 0, 1]}]"#).unwrap();
    let o = carnot(&["gradient", s(&heis), s(&poly), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["weight"], 2);
    let o = carnot(&["counterexample", "--model", "filiform", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["gradient"], serde_json::json!(["0", "x1^2 + x2^2"]));
    let o = carnot(&["counterexample", "--model", "free", "--m", "2", "--step", "3", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(carnot(&["counterexample", "--model", "other"]).status.code(), Some(2));
}

fn small_config(dir: &TempDir, seed: u64) -> PathBuf {
    let path = dir.path().join("config.toml");
    let text = format!(
        "seed = {seed}\nsweep = 5\nchio_per_size = 5\ngroup_samples = 5\nsearch_budget = 20\neps = [\"1/3\", \"1\"]\n\n[distribution]\nnum_min = -3\nnum_max = 3\nden_max = 2\n"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn verification_report_is_deterministic_and_detects_tampering() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir, 11);
    let a = carnot(&["verify-paper", "--config", s(&cfg), "--format", "json"]);
    let b = carnot(&["verify-paper", "--config", s(&cfg), "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(json["checks"].as_array().unwrap().len() >= 12);
    assert_eq!(json["seed"], 11);
    let t = carnot(&["verify-paper", "--config", s(&cfg), "--tamper"]);
    assert_eq!(t.status.code(), Some(1));
    assert!(stdout(&t).contains("[fail] algebra-validate"));
}

#[test]
fn config_eps_feeds_dinf() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(&dir, 0);
    let engel = build(&dir, "engel", &["filiform", "--step", "3"]);
    let o = carnot(&["group", "dinf", s(&engel), "0,0,1,0", "0,0,0,0", "--config", s(&cfg), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["terms"][1]["eps"], "1/3");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    assert_eq!(carnot(&["group", "q", s(&engel), "--config", s(&bad)]).status.code(), Some(2));
}

#[test]
fn json_round_trip_via_stdin() {
    let dir = TempDir::new().unwrap();
    let f23 = build(&dir, "f23", &["free", "--m", "2", "--step", "3"]);
    let text = std::fs::read_to_string(&f23).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_carnot"))
        .args(["build", "json", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), text.trim());
}
