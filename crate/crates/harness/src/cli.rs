//! The `connections` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use connections_core::approaches::ApproachId;
use connections_core::dataset::{dataset_summary, DifficultyBucket};
use connections_core::prompts::PromptCatalog;

use crate::config::RunConfig;
use crate::metrics::metrics_by_approach;
use crate::report::{embedded_puzzles, load_transcripts, report_csv, write_reports};
use crate::runner::{load_dataset, replay_dir, run_experiment, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "connections", version, about = "Play and score Connections puzzles with LLM solver pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallelism: Option<usize>,
        #[arg(long)]
        approach: Option<ApproachId>,
        #[arg(long)]
        model: Option<String>,
    },
    /// Re-run recorded games from their transcripts, with no network calls.
    Replay {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = crate::config::DEFAULT_PARALLELISM)]
        parallelism: usize,
    },
    /// Compute report.json and report.csv from a transcript directory.
    Report {
        dir: PathBuf,
        /// Archive to score against; defaults to the puzzles embedded in the transcripts.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a puzzle archive.
    Validate { path: PathBuf },
    /// Inspect the prompt templates.
    Prompts {
        #[command(subcommand)]
        action: PromptsAction,
    },
}

#[derive(Debug, Subcommand)]
enum PromptsAction {
    /// List template ids.
    List,
    /// Print one template, or all of them.
    Dump { id: Option<String> },
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FATAL
        }
    }
}

fn print_run(report: &RunReport, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    for m in &report.metrics {
        writeln!(
            out,
            "{}: {} puzzles, {:.2}% solved, {:.2}% perfect, {} correct, {} incorrect, {} aborted",
            m.approach, m.puzzles, m.solved_pct, m.perfect_pct, m.correct_total, m.incorrect_total, m.aborted
        )?;
    }
    writeln!(out, "wrote {} transcripts and reports to {}", report.transcripts.len(), report.out.display())?;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    match command {
        Command::Run { config, out: out_dir, seed, parallelism, approach, model } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(d) = out_dir {
                cfg.out = d;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(p) = parallelism {
                cfg.parallelism = p;
            }
            if let Some(a) = approach {
                // the configured model belonged to the old approach
                cfg.approach.approach = a;
                cfg.approach.model_id.clear();
            }
            if let Some(m) = model {
                cfg.approach.model_id = m;
            }
            let report = run_experiment(&cfg)?;
            print_run(&report, out, err)
        }
        Command::Replay { dir, out: out_dir, parallelism } => {
            let out_dir = out_dir.unwrap_or_else(|| dir.join("replay"));
            let (report, identical) = replay_dir(&dir, &out_dir, parallelism)?;
            print_run(&report, out, err)?;
            writeln!(out, "{identical} of {} transcripts identical to the recording", report.transcripts.len())?;
            Ok(())
        }
        Command::Report { dir, dataset, out: out_dir } => {
            let transcripts = load_transcripts(&dir)?;
            let puzzles = match dataset {
                Some(p) => load_dataset(&p)?,
                None => embedded_puzzles(&transcripts)?,
            };
            let metrics = metrics_by_approach(&transcripts, &puzzles)?;
            let (json, csv) = write_reports(&out_dir.unwrap_or(dir), &metrics)?;
            write!(out, "{}", report_csv(&metrics))?;
            writeln!(err, "wrote {} and {}", json.display(), csv.display())?;
            Ok(())
        }
        Command::Validate { path } => {
            let puzzles = load_dataset(&path)?;
            let n = puzzles.len();
            writeln!(out, "{n} {} OK", if n == 1 { "puzzle" } else { "puzzles" })?;
            let counts = dataset_summary(&puzzles);
            let parts: Vec<String> =
                DifficultyBucket::ALL.iter().map(|b| format!("{}={}", b.label(), counts.get(*b))).collect();
            writeln!(err, "difficulty buckets: {}", parts.join(" "))?;
            Ok(())
        }
        Command::Prompts { action } => {
            let catalog = PromptCatalog::builtin();
            match action {
                PromptsAction::List => {
                    for id in catalog.ids() {
                        writeln!(out, "{id}")?;
                    }
                    for t in catalog.brainstorm_templates() {
                        writeln!(out, "brainstorm.{:02}  {}", t.index(), t.pattern_line())?;
                    }
                }
                PromptsAction::Dump { id: Some(id) } => {
                    if let Some(n) = id.strip_prefix("brainstorm.") {
                        let t = n
                            .parse::<usize>()
                            .ok()
                            .and_then(|n| catalog.brainstorm_templates().iter().find(|t| t.index() == n))
                            .ok_or_else(|| anyhow::anyhow!("unknown template {id:?}"))?;
                        writeln!(out, "{}", t.body())?;
                    } else {
                        writeln!(out, "{}", catalog.get(&id)?.body())?;
                    }
                }
                PromptsAction::Dump { id: None } => {
                    for t in catalog.templates() {
                        writeln!(out, "=== {} ===\n{}\n", t.id(), t.body())?;
                    }
                    for t in catalog.brainstorm_templates() {
                        writeln!(out, "=== brainstorm.{:02} ===\n{}\n", t.index(), t.body())?;
                    }
                }
            }
            Ok(())
        }
    }
}
