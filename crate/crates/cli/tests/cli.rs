//! Exercises the `csbf` binary: exit-code contract, report formats, and
//! diagnostic surfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

fn csbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csbf"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("binary runs")
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

#[test]
fn symbolic_suite_exits_zero() {
    let out = csbf(&["verify", "--suite", "symbolic", "--format", "text", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("PASS  ").count(), 8, "{text}");
    assert!(text.contains("suite symbolic: PASS (8/8 checks)"));
}

#[test]
fn cap_too_small_is_usage_error() {
    let out = csbf(&["verify", "--suite", "instance", "--cap", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap too small for splitting check (needs >= 3)"), "{err}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = csbf(&["verify", "--wibble"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scenario_file_is_io_error() {
    let out = csbf(&["scenario", "does_not_exist.scn"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_scenario_reports_location_and_exits_two() {
    let dir = std::env::temp_dir().join("csbf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.scn");
    std::fs::write(&path, "algebra: sl2\n\nlet w0 = E^dx\ncheck c: w0 == beta\n").unwrap();
    let out = csbf(&["scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown symbol 'beta' at 4:16"), "{err}");
}

#[test]
fn failing_check_exits_one() {
    let dir = std::env::temp_dir().join("csbf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("failing.scn");
    std::fs::write(
        &path,
        "let a = E^dx + F_^dy + H^dz\nlet w0 = 0*a\ncheck wrong: tr(a^a^a) == 7*(dx^dy^dz)\n",
    )
    .unwrap();
    let out = csbf(&["scenario", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("\"verdict\": \"FAIL\""), "{json}");
    assert!(json.contains("\"certificate\""), "{json}");
}

#[test]
fn json_report_has_schema_and_fields() {
    let out = csbf(&[
        "verify", "--suite", "symbolic", "--format", "json", "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    for needle in [
        "\"schema\": \"report_v1\"",
        "\"suite\": \"symbolic\"",
        "\"algebra\": \"sl2\"",
        "\"seed\": 0",
        "\"backend\": \"symbolic\"",
        "\"verdict\": \"PASS\"",
    ] {
        assert!(json.contains(needle), "missing {needle} in {json}");
    }
    assert!(!json.contains("wall_ms"));
}

#[test]
fn timing_appears_without_no_timing_flag() {
    let out = csbf(&["verify", "--suite", "symbolic", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("wall_ms"), "{json}");
}

#[test]
fn sl3_instance_suite_passes() {
    let out = csbf(&[
        "verify", "--suite", "instance", "--algebra", "sl3", "--trials", "2", "--seed", "3",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("suite instance: PASS (19/19 checks)"), "{text}");
}

#[test]
fn bundled_scenarios_pass_through_binary() {
    for name in ["worked_sl2.scn", "bf_bullet.scn", "sl3_pair.scn"] {
        let path = format!("scenarios/{name}");
        let out = csbf(&["scenario", &path, "--no-timing"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
