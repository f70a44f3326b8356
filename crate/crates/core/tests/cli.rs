use std::process::{Command, Output};

use d4verify::pell::Intersection;
use d4verify::reduction::ReductionTranscript;
use d4verify::verify::CampaignSummary;

fn d4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d4verify"))
        .args(args)
        .env_remove("D4VERIFY_FORMAT")
        .env_remove("D4VERIFY_PRECISION")
        .env_remove("D4VERIFY_CONFIG")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&d4(&["check", "3", "4", "15", "224"])), 0);
    assert_eq!(code(&d4(&["check", "1", "2"])), 1);
    assert_eq!(code(&d4(&["check", "1"])), 64);
    assert_eq!(code(&d4(&["extend", "1", "2", "3"])), 65);
    assert_eq!(code(&d4(&["intersect", "3", "15", "--m-max", "0"])), 64);
    assert_eq!(code(&d4(&["reduce", "1", "20"])), 64);
    assert_eq!(code(&d4(&["campaign", "nope"])), 64);
    assert_eq!(code(&d4(&["--help"])), 0);
}

#[test]
fn json_outputs_round_trip() {
    let o = d4(&["--format", "json", "intersect", "3", "15", "--m-max", "50"]);
    let rows: Vec<Intersection> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].derived_c, 224.into());
    let again = serde_json::to_string_pretty(&rows).unwrap();
    assert_eq!(again.trim(), stdout(&o).trim());

    let o = d4(&["--format", "json", "reduce", "1", "3360", "--M0", "4.3e19"]);
    let t: ReductionTranscript = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(t.final_m <= 6.into());
    assert_eq!(serde_json::to_string_pretty(&t).unwrap().trim(), stdout(&o).trim());
}

#[test]
fn environment_is_a_fallback_for_flags() {
    let run = |env: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_d4verify"))
            .args(args)
            .env("D4VERIFY_FORMAT", env)
            .output()
            .unwrap()
    };
    let o = run("json", &["check", "1", "5"]);
    assert!(stdout(&o).trim_start().starts_with('{'));
    let o = run("json", &["--format", "text", "check", "1", "5"]);
    assert!(stdout(&o).contains("is a D(4)-tuple: yes"));
    assert_eq!(code(&run("yaml", &["check", "1", "5"])), 64);
}

#[test]
fn campaign_b2_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = d4(&["--output-dir", d, "--format", "json", "campaign", "b2"]);
    assert_eq!(code(&o), 0);
    let s: CampaignSummary = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(s.counts["reduced"], 5);
    let file: CampaignSummary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b2/summary.json")).unwrap()).unwrap();
    assert_eq!(file, s);
    let cases = std::fs::read_to_string(dir.path().join("b2/cases.jsonl")).unwrap();
    assert_eq!(cases.lines().count(), 6);
}

#[test]
fn sharded_runs_give_identical_summaries() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, w) in [(&a, "1"), (&b, "8")] {
        let o = d4(&["--output-dir", dir.path().to_str().unwrap(), "--workers", w, "campaign", "b1", "--a-max", "60"]);
        assert_eq!(code(&o), 0);
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("b1/summary.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}
