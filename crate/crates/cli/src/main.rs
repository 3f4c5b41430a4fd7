use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itinera::harness::{reaggregate, BackendMode, Engine, HarnessError, QueryRun, RunConfig};
use itinera::metrics::{render_table, report_json};
use itinera::sandbox::{load_database, DataPaths};

#[derive(Parser)]
#[command(name = "itinera", version, about = "Plan trips with a tool-using agent and score the plans")]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one query from the corpus.
    Run {
        #[arg(long)]
        query: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Plan every query in the corpus and write the aggregate report.
    Bench {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run against the live backend and save the transcript for later replay.
    Record {
        /// Only this query; the whole corpus otherwise.
        #[arg(long)]
        query: Option<String>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Load the sandbox tables and report problems.
    ValidateData {
        #[arg(long)]
        data_dir: PathBuf,
    },
    /// Rebuild the corpus report from existing run directories.
    Report {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, default_value = "runs")]
        label: String,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunOpts {
    /// TOML config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    backend: Option<BackendMode>,
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    plan_temperature: Option<f64>,
    #[arg(long)]
    k_candidates: Option<usize>,
    #[arg(long)]
    route_retries: Option<u32>,
    #[arg(long)]
    min_pop: Option<usize>,
    #[arg(long)]
    step_limit: Option<u32>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    strict_replay: bool,
    #[arg(long)]
    label: Option<String>,
}

impl RunOpts {
    fn resolve(self) -> Result<RunConfig, HarnessError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag { c.$field = v; }
            )*};
        }
        set!(data_dir => data_dir, corpus => corpus_path, backend => backend, model => model, base_url => base_url,
             plan_temperature => plan_temperature, k_candidates => k_candidates, route_retries => route_retries,
             min_pop => min_pop, step_limit => step_limit, parallelism => parallelism, output => output_dir);
        if self.transcript.is_some() {
            c.transcript_path = self.transcript;
        }
        if self.label.is_some() {
            c.label = self.label;
        }
        c.strict_replay |= self.strict_replay;
        Ok(c)
    }
}

fn print_run(run: &QueryRun, engine: &Engine) {
    let o = &run.outcome;
    match &o.report {
        Some(r) if o.delivered => println!(
            "{}: delivered in {} steps; commonsense {}/{}, hard {}/{}, cost {}",
            o.query_id,
            o.steps_used,
            r.commonsense_passed_count(),
            r.passed_commonsense.len(),
            r.hard_passed_count(),
            r.passed_hard.len(),
            r.cost.to_dollar_string()
        ),
        _ => println!(
            "{}: not delivered ({}) after {} steps{}",
            o.query_id,
            o.delivery_failure.map(|c| c.to_string()).unwrap_or_default(),
            o.steps_used,
            run.failure_message.as_deref().map(|m| format!(": {m}")).unwrap_or_default()
        ),
    }
    if let Some(r) = &o.report {
        for f in &r.findings {
            println!("  day {} {}: {} {}", f.location.day, f.location.field.label(), f.code, f.detail);
        }
    }
    println!("artifacts: {}", engine.run_dir(&o.query_id).display());
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { query, opts } => {
            let engine = Engine::from_config(opts.resolve()?)?;
            let run = engine.run_single(&query)?;
            print_run(&run, &engine);
        }
        Command::Bench { opts } => {
            let engine = Engine::from_config(opts.resolve()?)?;
            let report = engine.run_corpus()?;
            print!("{}", render_table(std::slice::from_ref(&report)));
            println!("report: {}", engine.config().output_dir.display());
        }
        Command::Record { query, opts } => {
            let mut config = opts.resolve()?;
            config.backend = BackendMode::Record;
            let engine = Engine::from_config(config)?;
            match query {
                Some(id) => print_run(&engine.run_single(&id)?, &engine),
                None => print!("{}", render_table(std::slice::from_ref(&engine.run_corpus()?))),
            }
            if let Some(t) = &engine.config().transcript_path {
                println!("transcript: {}", t.display());
            }
        }
        Command::ValidateData { data_dir } => {
            let db = load_database(&DataPaths::in_dir(&data_dir))?;
            let c = db.counts();
            println!(
                "ok: {} flights, {} accommodations, {} restaurants, {} attractions, {} distances, {} cities",
                c.flights, c.accommodations, c.restaurants, c.attractions, c.distances, c.cities
            );
        }
        Command::Report { runs, label, json } => {
            let report = reaggregate(&runs, &label)?;
            if json {
                println!("{}", report_json(&report));
            } else {
                print!("{}", render_table(std::slice::from_ref(&report)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
