use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn itinera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itinera")).args(args).env_remove("ITINERA_API_KEY").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn replay_args<'a>(corpus: &'a str, transcript: &'a str, out: &'a str) -> Vec<&'a str> {
    vec!["--backend", "replay", "--strict-replay", "--corpus", corpus, "--transcript", transcript, "--output", out]
}

fn path(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_data_reports_counts() {
    let data = path(&fixtures().join("data"));
    let o = itinera(&["validate-data", "--data-dir", &data]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: 10 flights") && stdout(&o).contains("10 cities"), "{}", stdout(&o));
}

#[test]
fn validate_data_rejects_missing_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let o = itinera(&["validate-data", "--data-dir", &path(&tmp.path().join("nowhere"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(itinera(&[]).status.code(), Some(1));
    assert_eq!(itinera(&["run"]).status.code(), Some(1));
    assert_eq!(itinera(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(itinera(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_replays_golden_query() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, corpus, transcript, out) = (
        path(&fixtures().join("data")),
        path(&fixtures().join("replay/honolulu.jsonl")),
        path(&fixtures().join("replay/honolulu.log")),
        path(tmp.path()),
    );
    let mut args = vec!["run", "--query", "honolulu", "--data-dir", &data];
    args.extend(replay_args(&corpus, &transcript, &out));
    let o = itinera(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("honolulu: delivered in 8 steps"), "{}", stdout(&o));
    for f in ["plan.json", "report.json", "run.jsonl", "transcript.log"] {
        assert!(tmp.path().join("honolulu").join(f).is_file(), "{f}");
    }

    let mut args = vec!["run", "--query", "nope", "--data-dir", &data];
    args.extend(replay_args(&corpus, &transcript, &out));
    assert_eq!(itinera(&args).status.code(), Some(1));
}

#[test]
fn run_without_transcript_is_a_usage_error() {
    let data = path(&fixtures().join("data"));
    let o = itinera(&["run", "--query", "honolulu", "--data-dir", &data, "--backend", "replay"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, corpus, transcript, out) = (
        path(&fixtures().join("data")),
        path(&fixtures().join("replay/corpus.jsonl")),
        path(&fixtures().join("replay/corpus.log")),
        path(tmp.path()),
    );
    let mut args = vec!["bench", "--data-dir", &data, "--parallelism", "2", "--label", "fixture"];
    args.extend(replay_args(&corpus, &transcript, &out));
    let o = itinera(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("80.0"), "{}", stdout(&o));

    let o = itinera(&["report", "--runs", &out, "--label", "fixture", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcomes"], 5);
    assert_eq!(v["delivery_rate"], "80.0");
    assert_eq!(v["final_pass_rate"], "20.0");
}
