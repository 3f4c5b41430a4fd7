use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::collect::LoopConfig;
use crate::llm::{GatewayConfig, HttpConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendMode {
    Live,
    #[default]
    Replay,
    Record,
}

impl std::str::FromStr for BackendMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "live" => Ok(BackendMode::Live),
            "replay" => Ok(BackendMode::Replay),
            "record" => Ok(BackendMode::Record),
            other => Err(format!("unknown backend mode {other:?}; expected live, replay or record")),
        }
    }
}

/// Everything a run needs. Loaded from TOML; command-line flags override fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub corpus_path: PathBuf,
    pub backend: BackendMode,
    pub transcript_path: Option<PathBuf>,
    pub model: String,
    pub base_url: String,
    pub plan_temperature: f64,
    pub k_candidates: usize,
    pub route_retries: u32,
    pub min_pop: usize,
    pub step_limit: u32,
    pub parallelism: usize,
    pub output_dir: PathBuf,
    /// Fail on a request digest mismatch instead of warning.
    pub strict_replay: bool,
    pub transport_retries: u32,
    pub request_timeout_secs: u64,
    pub top_p: Option<f64>,
    pub seed: Option<u64>,
    /// Name shown in corpus reports; defaults to the model.
    pub label: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let http = HttpConfig::default();
        RunConfig {
            data_dir: PathBuf::from("data"),
            corpus_path: PathBuf::from("corpus.jsonl"),
            backend: BackendMode::Replay,
            transcript_path: None,
            model: http.model,
            base_url: http.base_url,
            plan_temperature: 0.7,
            k_candidates: 3,
            route_retries: 3,
            min_pop: 5,
            step_limit: 45,
            parallelism: 1,
            output_dir: PathBuf::from("runs"),
            strict_replay: false,
            transport_retries: GatewayConfig::default().max_retries,
            request_timeout_secs: http.request_timeout_secs,
            top_p: None,
            seed: None,
            label: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Usage(format!("config: {e}")))
    }

    /// Reads a TOML file. Relative paths inside it resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            fix(&mut cfg.data_dir);
            fix(&mut cfg.corpus_path);
            fix(&mut cfg.output_dir);
            if let Some(t) = cfg.transcript_path.as_mut() {
                fix(t);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let usage = |m: &str| Err(HarnessError::Usage(m.to_string()));
        if self.backend != BackendMode::Live && self.transcript_path.is_none() {
            return usage("replay and record modes need a transcript path");
        }
        if self.parallelism < 1 {
            return usage("parallelism must be at least 1");
        }
        if self.k_candidates < 1 {
            return usage("k_candidates must be at least 1");
        }
        if self.route_retries < 1 {
            return usage("route_retries must be at least 1");
        }
        if self.step_limit < 1 {
            return usage("step_limit must be at least 1");
        }
        if !(0.0..=2.0).contains(&self.plan_temperature) {
            return usage("plan_temperature must lie in [0, 2]");
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.model.clone())
    }

    pub fn loop_config(&self) -> LoopConfig {
        LoopConfig {
            step_limit: self.step_limit,
            k_candidates: self.k_candidates,
            min_pop: self.min_pop,
            ..LoopConfig::default()
        }
    }

    pub fn gateway_config(&self) -> GatewayConfig {
        GatewayConfig { plan_temperature: self.plan_temperature, max_retries: self.transport_retries }
    }

    pub fn http_config(&self) -> HttpConfig {
        HttpConfig {
            base_url: self.base_url.clone(),
            model: self.model.clone(),
            request_timeout_secs: self.request_timeout_secs,
            top_p: self.top_p,
            seed: self.seed,
        }
    }
}
