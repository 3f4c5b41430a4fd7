//! Regenerates the replay transcripts under tests/fixtures/replay from the
//! scripted agent replies in tests/fixtures/scripts.
//!
//!     cargo run -p itinera-core --example author_fixtures

use std::path::{Path, PathBuf};
use std::sync::Arc;

use itinera::harness::{load_corpus, Engine, RunConfig};
use itinera::llm::{write_transcript, AgentScript, ScriptedAgent};
use itinera::sandbox::{load_database, DataPaths};

const GUIDES: &str = "1. Accommodations should be booked for the correct dates, ensuring no gaps or overlaps in lodging.\n\
2. Dining options should be reasonably spaced throughout the day.\n\
3. Transportation between cities should be confirmed before planning activities there.\n\
4. Each attraction should be visited only once during the trip.";

fn script_for(dir: &Path, query_id: &str) -> AgentScript {
    let name = if query_id.starts_with("honolulu") { "honolulu" } else { query_id };
    let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).expect("script file");
    serde_json::from_str(&text).expect("script parses")
}

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let scripts = fixtures.join("scripts");
    let replay = fixtures.join("replay");
    let scratch = tempfile::tempdir().expect("scratch dir");
    for set in ["honolulu", "corpus", "failures"] {
        let corpus_path = replay.join(format!("{set}.jsonl"));
        let queries = load_corpus(&corpus_path).expect("corpus loads");
        let mut agent = ScriptedAgent::new(GUIDES);
        for q in &queries {
            agent = agent.with_script(&q.id, script_for(&scripts, &q.id));
        }
        let db = load_database(&DataPaths::in_dir(fixtures.join("data"))).expect("database loads");
        let config = RunConfig { output_dir: scratch.path().join(set), ..RunConfig::default() };
        let engine = Engine::with_backend(config, db, Arc::new(agent)).expect("engine");
        let report = engine.run_queries(&queries).expect("runs");
        let mut entries = engine.transcript();
        entries.sort_by(|a, b| (&a.scope, a.role, a.seq).cmp(&(&b.scope, b.role, b.seq)));
        let out = replay.join(format!("{set}.log"));
        write_transcript(&out, &entries).expect("transcript written");
        println!("{}: {} entries\n{report}", out.display(), entries.len());
    }
}
