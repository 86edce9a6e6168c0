//! Exit codes, report shapes, and byte-stability of the binary, driven over
//! the checked-in fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn horseforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horseforge"))
        .args(args)
        .env_remove("HF_BREAKPOINT_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn tent() -> String {
    fixture("tent_plateau.json").display().to_string()
}

/// Writes the tent certificate into the given directory and returns its path.
fn found_cert(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("cert.json").display().to_string();
    let out = horseforge(&[
        "horseshoe", "find", "--map", &tent(), "--max-power", "1", "--out", &path,
    ]);
    assert_eq!(code(&out), 0);
    path
}

#[test]
fn find_emits_the_tent_certificate() {
    let out = horseforge(&["horseshoe", "find", "--map", &tent(), "--max-power", "1"]);
    assert_eq!(code(&out), 0);
    let cert: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(cert["r"], 1);
    assert_eq!(cert["J0"], serde_json::json!(["0", "1/3"]));
    assert_eq!(cert["J1"], serde_json::json!(["2/3", "1"]));
}

#[test]
fn find_reports_absence_within_bound() {
    let affine = fixture("affine.json").display().to_string();
    let out = horseforge(&["horseshoe", "find", "--map", &affine, "--max-power", "8"]);
    assert_eq!(code(&out), 1);
    assert!(stdout_of(&out).contains("no certificate"));
}

#[test]
fn malformed_rational_is_a_line_precise_error() {
    let bad = fixture("bad_rational.json").display().to_string();
    let out = horseforge(&["horseshoe", "find", "--map", &bad, "--max-power", "1"]);
    assert_eq!(code(&out), 2);
    let message = stderr_of(&out);
    assert!(message.contains("1//3"), "diagnostic names the token: {message}");
    assert!(message.contains("line 2"), "diagnostic carries the line: {message}");
}

#[test]
fn verify_accepts_found_and_rejects_tampered_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cert = found_cert(&dir);
    let ok = horseforge(&["horseshoe", "verify", "--map", &tent(), "--cert", &cert]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout_of(&ok).trim(), "verified");

    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, r#"{"r":1,"J0":["0","1/2"],"J1":["1/2","1"]}"#).unwrap();
    let bad = horseforge(&[
        "horseshoe", "verify", "--map", &tent(),
        "--cert", &tampered.display().to_string(),
    ]);
    assert_eq!(code(&bad), 2);
    assert!(stderr_of(&bad).contains("rejected"));
}

#[test]
fn pullback_prints_exact_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cert = found_cert(&dir);
    let base = ["horseshoe", "pullback", "--map"];

    let out = horseforge(&[&base[..], &[&tent(), "--cert", &cert, "--word", "01"]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "2/9 1/3\n");

    let out = horseforge(&[&base[..], &[&tent(), "--cert", &cert, "--word", "0"]].concat());
    assert_eq!(stdout_of(&out), "0 1/3\n");

    let out = horseforge(&[&base[..], &[&tent(), "--cert", &cert, "--word", "021"]].concat());
    assert_eq!(code(&out), 2);
}

#[test]
fn selftest_passes_exhaustively_at_small_depth() {
    let dir = tempfile::tempdir().unwrap();
    let cert = found_cert(&dir);
    let out = horseforge(&[
        "horseshoe", "selftest", "--map", &tent(), "--cert", &cert, "--depth", "4",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["words_checked"], 16);
    assert_eq!(report["exhaustive"], true);
}

#[test]
fn entropy_laps_follow_the_doubling_pattern() {
    let out = horseforge(&["entropy", "laps", "--map", &tent(), "--max-power", "4"]);
    assert_eq!(code(&out), 0);
    let table: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let counts: Vec<u64> = table
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["lap_count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![3, 7, 15, 31]);
}

#[test]
fn blowup_chain_builds_checks_and_reports_obstructions() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json").display().to_string();
    let orbit = fixture("orbit_two_cycle.json").display().to_string();

    let built = horseforge(&[
        "blowup", "build", "--map", &tent(), "--orbit", &orbit, "--out", &model,
    ]);
    assert_eq!(code(&built), 0, "stderr: {}", stderr_of(&built));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&built)).unwrap();
    assert_eq!(report["all_exact"], true);
    assert_eq!(report["semiconjugacy"]["off_collar_exact"], true);
    assert_eq!(report["semiconjugacy"]["residual_bound"], "3/500");
    assert_eq!(report["interval_orbits"].as_array().unwrap().len(), 16);

    let checked = horseforge(&["blowup", "check", "--model", &model]);
    assert_eq!(code(&checked), 0);
    let check_report: serde_json::Value = serde_json::from_str(&stdout_of(&checked)).unwrap();
    assert_eq!(check_report["all_exact"], true);

    let csv = horseforge(&["blowup", "check", "--model", &model, "--format", "csv"]);
    assert_eq!(code(&csv), 0);
    assert!(stdout_of(&csv).starts_with("insertion,step,visited,length\n"));

    let obstruction = horseforge(&["blowup", "obstruction", "--model", &model]);
    assert_eq!(code(&obstruction), 0);
    let obstruction_report: serde_json::Value =
        serde_json::from_str(&stdout_of(&obstruction)).unwrap();
    assert_eq!(obstruction_report["start"], 16);
    assert_eq!(obstruction_report["min_gap_positive"], true);

    let gaps_csv = horseforge(&[
        "blowup", "obstruction", "--model", &model, "--format", "csv",
    ]);
    assert_eq!(code(&gaps_csv), 0);
    let text = stdout_of(&gaps_csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,insertion,gap"));
    assert!(lines.next().unwrap().starts_with("1,5,"));
}

#[test]
fn blowup_rejects_bad_orbits() {
    let plateau = fixture("orbit_plateau_seed.json").display().to_string();
    let out = horseforge(&["blowup", "build", "--map", &tent(), "--orbit", &plateau]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("plateau"));

    let empty = fixture("orbit_empty.json").display().to_string();
    let out = horseforge(&["blowup", "build", "--map", &tent(), "--orbit", &empty]);
    assert_eq!(code(&out), 2);
}

#[test]
fn asymptotic_resolves_prints_and_exits_by_outcome() {
    let out = horseforge(&["shift", "asymptotic", "--p", "01(1)", "--q", "10(1)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "2\n");

    let never = horseforge(&["shift", "asymptotic", "--p", "(01)", "--q", "(10)"]);
    assert_eq!(code(&never), 1);
    assert_eq!(stdout_of(&never), "never\n");

    let bad = horseforge(&["shift", "asymptotic", "--p", "01(", "--q", "(1)"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn blockcode_recodes_the_alternating_sequence() {
    let out = horseforge(&["shift", "blockcode", "--p", "(01)", "--block", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "(1)\n");
}

#[test]
fn primitive_decides_both_ways() {
    let full = fixture("fullshift.json").display().to_string();
    let out = horseforge(&["shift", "primitive", "--graph", &full]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "k=1\n");

    let cycle = fixture("two_cycle_graph.json").display().to_string();
    let out = horseforge(&["shift", "primitive", "--graph", &cycle]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_of(&out), "not primitive: period 2\n");
}

#[test]
fn pipeline_exit_tracks_conclusiveness() {
    let swap = fixture("swap.json").display().to_string();
    let out = horseforge(&["analyze", "pipeline", "--map", &swap, "--max-power", "4"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["status"], "certificate found");
    assert_eq!(report["certificate"]["r"], 2);
    assert_eq!(report["rate"], "4");
    assert_eq!(report["entropy_bound"]["bound"], "log2/4");

    let affine = fixture("affine.json").display().to_string();
    let out = horseforge(&["analyze", "pipeline", "--map", &affine, "--max-power", "4"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["status"], "inconclusive");
}

#[test]
fn decompose_finds_the_swap_and_nothing_on_the_tent() {
    let swap = fixture("swap.json").display().to_string();
    let out = horseforge(&["analyze", "decompose", "--map", &swap]);
    assert_eq!(code(&out), 0);
    let evidence: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(evidence["c"], "1/2");

    let out = horseforge(&["analyze", "decompose", "--map", &tent()]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_of(&out), "none\n");
}

#[test]
fn cycle_verification_is_exact() {
    let swap = fixture("swap.json").display().to_string();
    let out = horseforge(&["analyze", "cycle", "--map", &swap, "--cycle", "0,1/2;1/2,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out).trim(), "verified");

    let out = horseforge(&["analyze", "cycle", "--map", &swap, "--cycle", "0,1/2;1/2,3/4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn breakpoint_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_horseforge"))
        .args(["entropy", "laps", "--map", &tent(), "--max-power", "8"])
        .env("HF_BREAKPOINT_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("cap"));

    let out = Command::new(env!("CARGO_BIN_EXE_horseforge"))
        .args(["entropy", "laps", "--map", &tent(), "--max-power", "2"])
        .env("HF_BREAKPOINT_CAP", "banana")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_byte_stable_across_runs() {
    let first = horseforge(&["horseshoe", "find", "--map", &tent(), "--max-power", "1"]);
    let second = horseforge(&["horseshoe", "find", "--map", &tent(), "--max-power", "1"]);
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    let orbit = fixture("orbit_two_cycle.json").display().to_string();
    let model_a = dir.path().join("a.json").display().to_string();
    let model_b = dir.path().join("b.json").display().to_string();
    for model in [&model_a, &model_b] {
        let out = horseforge(&[
            "blowup", "build", "--map", &tent(), "--orbit", &orbit, "--out", model,
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(
        std::fs::read(&model_a).unwrap(),
        std::fs::read(&model_b).unwrap()
    );
}

#[test]
fn out_flag_redirects_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = horseforge(&[
        "horseshoe", "find", "--map", &tent(), "--max-power", "1",
        "--out", &path.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = horseforge(&["horseshoe", "find", "--map", &tent(), "--max-power", "1"]);
    assert_eq!(written, stdout_of(&direct));
}
