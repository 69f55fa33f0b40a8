//! Runs many games, writes their transcripts, then scores them from disk.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use connections_core::approaches::{run_game, ApproachConfig};
use connections_core::dataset::load_archive;
use connections_core::provider::{
    CompletionProvider, OracleProvider, ReplayProvider, RetryingProvider, ScriptedProvider,
};
use connections_core::puzzle::Puzzle;
use connections_core::transcript::{AbortKind, Transcript};

use crate::config::{game_seed, ProviderSpec, RunConfig};
use crate::live::LiveProvider;
use crate::metrics::{metrics_by_approach, Metrics};
use crate::report::{embedded_puzzles, load_transcripts, write_reports, write_transcript, TRANSCRIPTS_DIR};
use crate::HarnessError;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out: PathBuf,
    pub transcripts: Vec<PathBuf>,
    pub metrics: Vec<Metrics>,
    pub warnings: Vec<String>,
}

pub fn load_dataset(path: &Path) -> Result<Vec<Puzzle>, HarnessError> {
    let bytes = std::fs::read(path).map_err(HarnessError::io(path))?;
    load_archive(&bytes).map_err(|e| HarnessError::Dataset { path: path.to_path_buf(), message: e.to_string() })
}

/// Runs `play` over `items` on up to `parallelism` threads, keeping input order.
pub fn parallel_map<T, R, F>(items: &[T], parallelism: usize, play: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..parallelism.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = items.get(i) else { break };
                let r = play(item);
                results.lock().expect("results lock")[i] = Some(r);
            });
        }
    });
    results.into_inner().expect("results lock").into_iter().map(|r| r.expect("every item played")).collect()
}

enum Source {
    Oracle,
    Scripted(Vec<String>),
    Replay(BTreeMap<String, Transcript>),
    Live(Arc<dyn CompletionProvider>),
}

impl Source {
    fn build(spec: &ProviderSpec) -> Result<Source, HarnessError> {
        Ok(match spec {
            ProviderSpec::Oracle => Source::Oracle,
            ProviderSpec::Scripted { completions } => Source::Scripted(completions.clone()),
            ProviderSpec::Replay { dir } => Source::Replay(
                load_transcripts(dir)?.into_iter().map(|t| (t.header.game_id.clone(), t)).collect(),
            ),
            ProviderSpec::Live { endpoint, timeout_secs, retry } => {
                let live = LiveProvider::from_env(endpoint, Duration::from_secs(*timeout_secs)).map_err(|e| {
                    HarnessError::Config { path: endpoint.into(), message: e.to_string() }
                })?;
                Source::Live(Arc::new(RetryingProvider::new(live, *retry)))
            }
        })
    }

    fn play(&self, puzzle: &Puzzle, cfg: &ApproachConfig) -> Transcript {
        let provider: Box<dyn CompletionProvider> = match self {
            Source::Oracle => Box::new(OracleProvider::new(puzzle.clone())),
            Source::Scripted(c) => Box::new(ScriptedProvider::new(c.iter().cloned())),
            Source::Replay(games) => {
                let id = connections_core::approaches::game_id(cfg.approach, puzzle.id);
                Box::new(games.get(&id).map(Transcript::replay_provider).unwrap_or_else(ReplayProvider::new))
            }
            Source::Live(p) => Box::new(p.clone()),
        };
        run_game(puzzle, provider.as_ref(), cfg).expect("config validated before the run")
    }
}

fn warnings(transcripts: &[Transcript]) -> Vec<String> {
    transcripts
        .iter()
        .filter_map(|t| {
            let a = t.aborted()?;
            let note = if a.kind == AbortKind::ProviderError { ", excluded from metrics" } else { "" };
            Some(format!("game {} aborted ({}{note}): {}", t.header.game_id, a.kind, a.reason))
        })
        .collect()
}

fn finish(out: &Path, paths: Vec<PathBuf>, played: &[Transcript], dataset: &[Puzzle]) -> Result<RunReport, HarnessError> {
    // metrics come from what is on disk, not from the games in memory
    let on_disk = load_transcripts(&out.join(TRANSCRIPTS_DIR))?;
    let metrics = metrics_by_approach(&on_disk, dataset)?;
    write_reports(out, &metrics)?;
    Ok(RunReport { out: out.to_path_buf(), transcripts: paths, metrics, warnings: warnings(played) })
}

fn prepare_out(out: &Path) -> Result<(), HarnessError> {
    let dir = out.join(TRANSCRIPTS_DIR);
    std::fs::create_dir_all(&dir).map_err(HarnessError::io(&dir))
}

pub fn run_experiment(cfg: &RunConfig) -> Result<RunReport, HarnessError> {
    cfg.validate().map_err(|message| HarnessError::Config { path: "run config".into(), message })?;
    let puzzles = load_dataset(&cfg.dataset)?;
    let source = Source::build(&cfg.provider)?;
    prepare_out(&cfg.out)?;
    let results = parallel_map(&puzzles, cfg.parallelism, |p| {
        let game_cfg = ApproachConfig { rng_seed: game_seed(cfg.seed, p.id), ..cfg.approach.clone() };
        let t = source.play(p, &game_cfg);
        let path = write_transcript(&cfg.out, &t);
        (t, path)
    });
    let mut played = Vec::new();
    let mut paths = Vec::new();
    for (t, path) in results {
        paths.push(path?);
        played.push(t);
    }
    finish(&cfg.out, paths, &played, &puzzles)
}

/// Re-runs every recorded game from its own header and recorded completions.
pub fn replay_dir(src: &Path, out: &Path, parallelism: usize) -> Result<(RunReport, usize), HarnessError> {
    let recorded = load_transcripts(src)?;
    let puzzles = embedded_puzzles(&recorded)?;
    prepare_out(out)?;
    let results = parallel_map(&recorded, parallelism, |t| {
        let replayed = match t.puzzle() {
            Ok(p) => run_game(&p, &t.replay_provider(), &t.header.config).ok(),
            Err(_) => None,
        };
        let replayed = replayed.ok_or_else(|| HarnessError::Transcript {
            path: t.header.game_id.clone().into(),
            message: "cannot be replayed".into(),
        })?;
        let same = replayed.to_jsonl() == t.to_jsonl();
        let path = write_transcript(out, &replayed)?;
        Ok::<_, HarnessError>((replayed, path, same))
    });
    let mut played = Vec::new();
    let mut paths = Vec::new();
    let mut identical = 0;
    for r in results {
        let (t, path, same) = r?;
        identical += same as usize;
        paths.push(path);
        played.push(t);
    }
    Ok((finish(out, paths, &played, &puzzles)?, identical))
}
