use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn qdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdim")).args(args).output().expect("binary runs")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn closed_form_on_cantor() {
    let out = qdim(&["dim", "--method", "closed", "--model", &model("cantor.json")]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.6309297536\n");
}

#[test]
fn rejects_bad_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"maps":[{"kind":"affine","a":0.5,"b":0},{"kind":"affine","a":0.5,"b":0.5}],"probs":[0.6,0.6],"domain":[0,1]}"#,
    )
    .unwrap();
    let out = qdim(&["dim", "--method", "closed", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("probabilities sum to 1.2"), "{}", stderr(&out));
}

#[test]
fn rejects_expanding_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"maps":[{"kind":"affine","a":1.5,"b":0},{"kind":"affine","a":0.5,"b":0.5}],"probs":[0.5,0.5],"domain":[0,1]}"#,
    )
    .unwrap();
    let out = qdim(&["dim", "--method", "closed", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("map 1 is not a contraction"));
}

#[test]
fn malformed_document_names_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"maps\": [}\n").unwrap();
    let out = qdim(&["dim", "--method", "closed", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn empirical_refuses_zero_error() {
    let out = qdim(&[
        "dim", "--method", "empirical", "--model", &model("cantor.json"), "--depth", "3", "--n-list", "2..10",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("quantization error is zero"));
}

#[test]
fn resource_cap_exit_code() {
    let out = qdim(&["measure", "--model", &model("cantor.json"), "--depth", "30"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn usage_errors_are_validation_failures() {
    let out = qdim(&["dim", "--method", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_run_writes_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let out = qdim(&[
        "measure", "--model", &model("cantor.json"), "--depth", "30", "-o", target.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        let out = qdim(&[
            "measure", "--model", &model("moebius_pair.json"), "--chaos", "500", "--seed", seed,
            "-o", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv", "7"), run("b.csv", "7"));
    assert_ne!(run("a.csv", "7"), run("c.csv", "8"));

    let lloyd = |seed: &str| {
        qdim(&[
            "quantize", "--model", &model("cantor.json"), "--depth", "8", "--n-list", "2..6",
            "--method", "lloyd", "--seed", seed, "-f", "csv",
        ])
        .stdout
    };
    assert_eq!(lloyd("3"), lloyd("3"));
}

#[test]
fn measure_file_feeds_quantize() {
    let dir = tempfile::tempdir().unwrap();
    let atoms = dir.path().join("mu.csv");
    let out = qdim(&["measure", "--model", &model("cantor.json"), "--depth", "6", "-o", atoms.to_str().unwrap()]);
    assert!(out.status.success());
    let from_file = qdim(&["quantize", "--measure", atoms.to_str().unwrap(), "--n-list", "1..4"]);
    let from_model = qdim(&["quantize", "--model", &model("cantor.json"), "--depth", "6", "--n-list", "1..4"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_model.stdout);
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert!(text.starts_with("n,r,V,e,method,codebook_json\n"));
}

#[test]
fn spectral_grid_is_decreasing() {
    let out = qdim(&["spectral", "--model", &model("moebius_pair.json"), "--sigma-grid", "0:2:9", "--mesh-size", "129"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let spr: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(spr.len(), 9);
    assert!(spr.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn distortion_csv_header() {
    let out = qdim(&["distortion", "--model", &model("moebius_pair.json"), "--depth", "3"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("depth,maxT_over_R,c2\n"));
}

#[test]
fn verify_json_lists_every_check() {
    let out = qdim(&["verify", "--model", &model("cantor.json"), "--r-values", "2", "-f", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 10);
    assert!(checks.iter().all(|c| c["passed"] == true));
}
