//! Run orchestration: configuration, backend wiring, single and corpus runs,
//! and the on-disk run directory layout.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{BackendMode, RunConfig};

use crate::collect::{run_collection_loop, CollectionResult};
use crate::domain::{serialize_plan, ErrorCode, TravelQuery};
use crate::llm::{
    write_transcript, ChatBackend, Gateway, HttpBackend, LlmError, RecordingBackend, ReplayBackend, TranscriptEntry,
    CORPUS_SCOPE,
};
use crate::metrics::{render_table, report_json, CorpusReport, MetricsError, RunOutcome};
use crate::outline::{build_outline, BuiltOutline, GuidesCache, OutlineError};
use crate::sandbox::{load_database, DataPaths, SandboxError, TravelDatabase};
use crate::verify::verify_plan;

pub const TRANSCRIPT_FILE: &str = "transcript.log";
pub const PLAN_FILE: &str = "plan.json";
pub const REPORT_FILE: &str = "report.json";
pub const RUN_LOG_FILE: &str = "run.jsonl";
pub const CORPUS_REPORT_FILE: &str = "report.json";
pub const CORPUS_TABLE_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error("backend: {0}")]
    Backend(LlmError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl HarnessError {
    /// Process exit code: 1 usage, 2 data, 3 backend.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Backend(_) => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// One query per line; blank lines are skipped.
pub fn load_corpus(path: &Path) -> Result<Vec<TravelQuery>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Data(format!("cannot read corpus {}: {e}", path.display())))?;
    let mut out: Vec<TravelQuery> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let q: TravelQuery = serde_json::from_str(line)
            .map_err(|e| HarnessError::Data(format!("{} line {}: {e}", path.display(), n + 1)))?;
        q.validate().map_err(|e| HarnessError::Data(format!("{} line {}: {e}", path.display(), n + 1)))?;
        if out.iter().any(|o| o.id == q.id) {
            return Err(HarnessError::Data(format!("{} line {}: duplicate query id {}", path.display(), n + 1, q.id)));
        }
        out.push(q);
    }
    Ok(out)
}

/// Everything produced for one query.
#[derive(Debug, Clone)]
pub struct QueryRun {
    pub query: TravelQuery,
    pub outcome: RunOutcome,
    pub outline: Option<BuiltOutline>,
    pub collection: Option<CollectionResult>,
    pub failure_message: Option<String>,
}

type Recorder = RecordingBackend<Arc<dyn ChatBackend>>;

pub struct Engine {
    config: RunConfig,
    db: TravelDatabase,
    gateway: Gateway,
    recorder: Arc<Recorder>,
    guides: GuidesCache,
}

impl Engine {
    /// Loads the database and builds the backend the config asks for.
    pub fn from_config(config: RunConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let db = load_database(&DataPaths::in_dir(&config.data_dir))?;
        let transcript = config.transcript_path.clone();
        let backend: Arc<dyn ChatBackend> = match config.backend {
            BackendMode::Replay => {
                let path = transcript.expect("validated");
                let replay = ReplayBackend::from_file(&path, config.strict_replay)
                    .map_err(|e| HarnessError::Data(format!("transcript {}: {e}", path.display())))?;
                Arc::new(replay)
            }
            BackendMode::Live => Arc::new(HttpBackend::from_env(config.http_config()).map_err(HarnessError::Backend)?),
            BackendMode::Record => {
                let path = transcript.expect("validated");
                let http = HttpBackend::from_env(config.http_config()).map_err(HarnessError::Backend)?;
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(io_err(dir))?;
                }
                fs::write(&path, "").map_err(io_err(&path))?;
                Arc::new(RecordingBackend::with_sink(http, path))
            }
        };
        Self::with_backend(config, db, backend)
    }

    /// Uses the given backend regardless of the configured mode.
    pub fn with_backend(config: RunConfig, db: TravelDatabase, backend: Arc<dyn ChatBackend>) -> Result<Self, HarnessError> {
        RunConfig { transcript_path: Some(PathBuf::new()), ..config.clone() }.validate()?;
        let recorder = Arc::new(RecordingBackend::new(backend));
        let gateway = Gateway::new(recorder.clone(), config.gateway_config());
        Ok(Engine { config, db, gateway, recorder, guides: GuidesCache::new() })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn db(&self) -> &TravelDatabase {
        &self.db
    }

    pub fn gateway(&self) -> &Gateway {
        &self.gateway
    }

    /// Every exchange served so far, in arrival order.
    pub fn transcript(&self) -> Vec<TranscriptEntry> {
        self.recorder.entries()
    }

    fn warm_guides(&self) {
        if let Err(e) = self.guides.get_or_generate(&self.gateway) {
            log::warn!("commonsense guides unavailable: {e}");
        }
    }

    /// Runs the three phases and verification. Never fails; problems become an
    /// undelivered outcome.
    pub fn run_query(&self, query: &TravelQuery) -> QueryRun {
        let session = self.gateway.scoped(&query.id);
        let applicable = query.applicable_hard_constraints() as u32;
        let built = match build_outline(&session, query, &self.db, &self.guides, self.config.route_retries) {
            Ok(b) => b,
            Err(e) => {
                let code = match e {
                    OutlineError::Backend(_) => ErrorCode::BackendFailure,
                    _ => ErrorCode::OutlineFailure,
                };
                log::info!("{}: outline failed: {e}", query.id);
                return QueryRun {
                    query: query.clone(),
                    outcome: RunOutcome::undelivered(&query.id, code, applicable, 0),
                    outline: None,
                    collection: None,
                    failure_message: Some(e.to_string()),
                };
            }
        };
        let collection = run_collection_loop(&session, query, &built.outline, &self.db, self.config.loop_config());
        let (outcome, failure_message) = match &collection.result {
            Ok(plan) => {
                let report = verify_plan(&plan.days, query, &self.db);
                (RunOutcome::delivered(plan.clone(), report, collection.steps_used), None)
            }
            Err(f) => {
                log::info!("{}: not delivered: {} ({})", query.id, f.code, f.message);
                (RunOutcome::undelivered(&query.id, f.code, applicable, collection.steps_used), Some(f.message.clone()))
            }
        };
        QueryRun { query: query.clone(), outcome, outline: Some(built), collection: Some(collection), failure_message }
    }

    /// Runs one query and writes its run directory.
    pub fn run_and_persist(&self, query: &TravelQuery) -> Result<QueryRun, HarnessError> {
        self.warm_guides();
        let run = self.run_query(query);
        self.persist(&run)?;
        Ok(run)
    }

    /// Looks the query up in the configured corpus and runs it.
    pub fn run_single(&self, query_id: &str) -> Result<QueryRun, HarnessError> {
        let corpus = load_corpus(&self.config.corpus_path)?;
        let query = corpus
            .iter()
            .find(|q| q.id == query_id)
            .ok_or_else(|| HarnessError::Usage(format!("no query with id {query_id:?} in {}", self.config.corpus_path.display())))?;
        self.run_and_persist(query)
    }

    pub fn run_corpus(&self) -> Result<CorpusReport<f64>, HarnessError> {
        let corpus = load_corpus(&self.config.corpus_path)?;
        self.run_queries(&corpus)
    }

    /// Runs every query on a bounded pool, persists each run and the aggregate report.
    pub fn run_queries(&self, queries: &[TravelQuery]) -> Result<CorpusReport<f64>, HarnessError> {
        if queries.is_empty() {
            return Err(MetricsError::EmptyCorpus.into());
        }
        self.warm_guides();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.parallelism)
            .build()
            .map_err(|e| HarnessError::Usage(format!("worker pool: {e}")))?;
        let outcomes: Vec<RunOutcome> = pool.install(|| {
            queries
                .par_iter()
                .map(|q| {
                    let run = self.run_query(q);
                    self.persist(&run)?;
                    Ok(run.outcome)
                })
                .collect::<Result<_, HarnessError>>()
        })?;
        let report = CorpusReport::<f64>::compute(self.config.label(), &outcomes)?;
        write_corpus_report(&self.config.output_dir, &report)?;
        Ok(report)
    }

    pub fn run_dir(&self, query_id: &str) -> PathBuf {
        self.config.output_dir.join(query_id)
    }

    fn persist(&self, run: &QueryRun) -> Result<(), HarnessError> {
        let dir = self.run_dir(&run.query.id);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;

        let id = run.query.id.as_str();
        let entries: Vec<_> = self
            .recorder
            .entries()
            .into_iter()
            .filter(|e| e.scope == id || e.scope == CORPUS_SCOPE)
            .collect();
        let transcript = dir.join(TRANSCRIPT_FILE);
        write_transcript(&transcript, &entries).map_err(|e| HarnessError::Data(format!("{}: {e}", transcript.display())))?;

        let plan_path = dir.join(PLAN_FILE);
        match &run.outcome.plan {
            Some(plan) => {
                let text = serialize_plan(plan).map_err(|e| HarnessError::Data(e.to_string()))?;
                fs::write(&plan_path, text).map_err(io_err(&plan_path))?;
            }
            None if plan_path.exists() => fs::remove_file(&plan_path).map_err(io_err(&plan_path))?,
            None => {}
        }

        let report_path = dir.join(REPORT_FILE);
        let report = serde_json::to_string_pretty(&run.outcome).expect("outcome serializes");
        fs::write(&report_path, report + "\n").map_err(io_err(&report_path))?;

        let log_path = dir.join(RUN_LOG_FILE);
        let lines: Vec<String> = run_log(run, &self.gateway).iter().map(Value::to_string).collect();
        fs::write(&log_path, lines.join("\n") + "\n").map_err(io_err(&log_path))?;
        Ok(())
    }
}

/// Structured run log: outline, loop events, requests, outcome.
pub fn run_log(run: &QueryRun, gateway: &Gateway) -> Vec<Value> {
    let mut out = vec![json!({ "event": "query", "query": run.query })];
    if let Some(b) = &run.outline {
        out.push(json!({
            "event": "outline",
            "route_calls": b.route_calls,
            "rejections": b.rejections,
            "outline": b.outline.render_text(),
            "transport_notes": b.outline.transport_notes,
        }));
    }
    if let Some(c) = &run.collection {
        out.extend(c.events.iter().map(|e| serde_json::to_value(e).expect("event serializes")));
    }
    for r in gateway.request_log_for(&run.query.id) {
        let mut v = serde_json::to_value(&r).expect("record serializes");
        v["event"] = json!("request");
        out.push(v);
    }
    out.push(json!({
        "event": "outcome",
        "delivered": run.outcome.delivered,
        "delivery_failure": run.outcome.delivery_failure,
        "steps_used": run.outcome.steps_used,
        "message": run.failure_message,
    }));
    out
}

pub fn write_corpus_report(dir: &Path, report: &CorpusReport<f64>) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let json_path = dir.join(CORPUS_REPORT_FILE);
    let text = serde_json::to_string_pretty(&report_json(report)).expect("report serializes");
    fs::write(&json_path, text + "\n").map_err(io_err(&json_path))?;
    let table_path = dir.join(CORPUS_TABLE_FILE);
    fs::write(&table_path, render_table(std::slice::from_ref(report))).map_err(io_err(&table_path))?;
    Ok(())
}

/// Outcomes from every run directory under `dir`, in directory-name order.
pub fn load_outcomes(dir: &Path) -> Result<Vec<RunOutcome>, HarnessError> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join(REPORT_FILE).is_file())
        .collect();
    dirs.sort();
    dirs.iter()
        .map(|d| {
            let path = d.join(REPORT_FILE);
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Rebuilds the corpus report from run directories.
pub fn reaggregate(dir: &Path, label: &str) -> Result<CorpusReport<f64>, HarnessError> {
    let outcomes = load_outcomes(dir)?;
    Ok(CorpusReport::<f64>::compute(label, &outcomes)?)
}
