//! End to end checks of the command line binary: exit codes, CSV and JSON
//! shapes, and byte level determinism of repeated runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use entrosep::werner;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entrosep"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn write_state(dir: &Path, name: &str, p: f64) -> String {
    let path = dir.join(name);
    let json = werner::werner(p).unwrap().state().to_json();
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_flags_the_singlet_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "singlet.json", 1.0);
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    for id in ["E8-XY", "E12-XYZ", "E14-1_3", "E16-1_1_2", "E18-1111", "E22-SPIN"] {
        let row = text.lines().find(|l| l.starts_with(id)).expect("row present");
        assert!(row.ends_with("yes"), "{row}");
    }
    assert!(text.contains("decisive for two qubits"));
    assert!(text.contains("consistent"));
}

#[test]
fn check_passes_the_maximally_mixed_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "mixed.json", 0.0);
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains("yes"));
}

#[test]
fn check_at_p_07_flags_exactly_the_three_sensitive_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "w07.json", 0.7);
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let flagged: Vec<&str> = text
        .lines()
        .filter(|l| l.ends_with("yes"))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(flagged, ["E12-XYZ", "E14-1_3", "E22-SPIN"]);
}

#[test]
fn check_rejects_a_state_with_wrong_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mat: Vec<[f64; 2]> = (0..16)
        .map(|k| if k % 5 == 0 { [0.5, 0.0] } else { [0.0, 0.0] })
        .collect();
    let json = serde_json::json!({"dimA": 2, "dimB": 2, "matrix": mat});
    fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn check_rejects_a_missing_file_and_clap_rejects_unknown_flags() {
    let out = run(&["check", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn werner_sweep_is_byte_deterministic_with_the_documented_header() {
    let a = run(&["werner-sweep", "--steps", "51"]);
    let b = run(&["werner-sweep", "--steps", "51"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,E8-XY_value,E8-XY_violated,E12-XYZ_value,E12-XYZ_violated,\
         E14-1_3_value,E14-1_3_violated,E16-1_1_2_value,E16-1_1_2_violated,\
         E18-1111_value,E18-1111_violated,E22-SPIN_value,E22-SPIN_violated,ppt_flag"
    );
    assert_eq!(lines.count(), 51);
    let first = text.lines().nth(1).unwrap();
    let last = text.lines().last().unwrap();
    assert!(first.starts_with("0.00000000000e0,"));
    assert!(first.ends_with(",1"), "p=0 is ppt: {first}");
    assert!(last.ends_with(",0"), "p=1 is npt: {last}");
}

#[test]
fn werner_sweep_single_point_06_trips_only_the_spin_criterion() {
    let out = run(&[
        "werner-sweep",
        "--p-min",
        "0.6",
        "--p-max",
        "0.6",
        "--steps",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols.len(), 14);
    let flags: Vec<&str> = (2..13).step_by(2).map(|i| cols[i]).collect();
    assert_eq!(flags, ["0", "0", "0", "0", "0", "1"]);
    assert_eq!(cols[13], "0");
}

#[test]
fn werner_sweep_writes_the_same_bytes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "werner-sweep",
        "--steps",
        "11",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = fs::read(&path).unwrap();
    run(&["werner-sweep", "--steps", "11", "--csv", path.to_str().unwrap()]);
    assert_eq!(first, fs::read(&path).unwrap());
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 12);
}

#[test]
fn minimize_reports_floor_gap_and_writes_per_start_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("starts.csv");
    let out = run(&[
        "minimize",
        "--set",
        "1111",
        "--starts",
        "24",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("E_sep"));
    assert!(text.contains("gap"));
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "start,sep_value,global_value");
    assert_eq!(lines.count(), 24);
}

#[test]
fn bellset_emits_complete_observable_json() {
    let out = run(&["bellset", "--set", "1_3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["name"], "1_3");
    // dim is the joint space dimension the projector matrices live in
    assert_eq!(v["dim"], 4);
    let obs = v["observables"].as_array().unwrap();
    assert_eq!(obs.len(), 4);
    assert_eq!(obs[0]["label"], "X^(1,3)_1");
    assert_eq!(obs[0]["eigenvalues"], serde_json::json!([-1.0, 1.0]));
    let projectors = obs[0]["projectors"].as_array().unwrap();
    assert_eq!(projectors.len(), 2);
    // the +1 eigenspace of the first observable is the corner projector
    let plus = projectors[1].as_array().unwrap();
    assert_eq!(plus.len(), 16);
    let entry = |k: usize| plus[k].as_array().unwrap()[0].as_f64().unwrap();
    assert!((entry(0) - 0.5).abs() < 1e-12);
    assert!((entry(3) - 0.5).abs() < 1e-12);
    assert!((entry(15) - 0.5).abs() < 1e-12);
    assert!(entry(5).abs() < 1e-12);
}

#[test]
fn reproduce_with_reduced_starts_passes_end_to_end() {
    let out = run(&["reproduce", "--starts", "64"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("entrosep"));
}

#[test]
fn bits_flag_switches_the_report_unit() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "w05.json", 0.5);
    let nats = run(&["check", &path]);
    let bits = run(&["--bits", "check", &path]);
    assert_eq!(nats.status.code(), Some(0));
    assert_eq!(bits.status.code(), Some(0));
    assert!(stdout(&nats).contains("nats"));
    assert!(stdout(&bits).contains("bits"));
    assert_ne!(nats.stdout, bits.stdout);
}
