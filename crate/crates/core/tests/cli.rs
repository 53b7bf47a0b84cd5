use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeat-infer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn infer_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let (heat, overlay) = (dir.path().join("h.pgm"), dir.path().join("o.pgm"));
    let out = run(&[
        "infer",
        "--score",
        path(&fixture("toy_score.json")),
        "--performance",
        path(&fixture("toy.mid")),
        "--heatmap",
        path(&heat),
        "--heatmap-overlay",
        path(&overlay),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        out.stdout,
        std::fs::read(fixture("golden/toy_result.json")).unwrap()
    );
    // A is played cleanly as five notes, each a match: 10 * (1 - 0.9^5).
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let a = &result["segments"][0];
    assert_eq!(a["perf_rows"], serde_json::json!([0, 4]));
    assert!((a["local_gain"].as_f64().unwrap() - 10.0 * (1.0 - 0.9f64.powi(5))).abs() < 1e-5);
    assert_eq!(
        std::fs::read(heat).unwrap(),
        std::fs::read(fixture("golden/toy_heatmap.pgm")).unwrap()
    );
    assert_eq!(
        std::fs::read(overlay).unwrap(),
        std::fs::read(fixture("golden/toy_overlay.pgm")).unwrap()
    );
}

#[test]
fn audit_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("audit.json");
    let out = run(&[
        "audit",
        "--manifest",
        path(&fixture("manifest.json")),
        "--output",
        path(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        std::fs::read(report).unwrap(),
        std::fs::read(fixture("golden/toy_audit.json")).unwrap()
    );
}

#[test]
fn versions_lists_structures() {
    let out = run(&["versions", "--score", path(&fixture("toy_score.json"))]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ABCBDE\nABDE\n");
}

#[test]
fn synth_output_round_trips_through_infer() {
    let dir = tempfile::tempdir().unwrap();
    let perf = dir.path().join("perf.json");
    let out = run(&[
        "synth",
        "--score",
        path(&fixture("toy_score.json")),
        "--structure",
        "ABDE",
        "--seed",
        "7",
        "--output",
        path(&perf),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(&[
        "infer",
        "--score",
        path(&fixture("toy_score.json")),
        "--performance",
        path(&perf),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(result["structure"], "ABDE");
}

#[test]
fn malformed_score_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let score = dir.path().join("bad.json");
    std::fs::write(
        &score,
        r#"{"name": "bad", "onsets": [[60], [200]], "markers": []}"#,
    )
    .unwrap();
    let out = run(&[
        "infer",
        "--score",
        path(&score),
        "--performance",
        path(&fixture("toy.mid")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("onsets[1][0]"), "{stderr}");
}

#[test]
fn missing_file_exits_1() {
    let out = run(&[
        "infer",
        "--score",
        "no/such/score.json",
        "--performance",
        path(&fixture("toy.mid")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/score.json"));
}

#[test]
fn unknown_structure_is_a_validation_error() {
    let out = run(&[
        "synth",
        "--score",
        path(&fixture("toy_score.json")),
        "--structure",
        "AXE",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
