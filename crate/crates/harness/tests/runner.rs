use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use connections_core::approaches::{ApproachConfig, ApproachId};
use connections_core::dataset::to_archive_json;
use connections_core::fixtures::{fixture_puzzles, puzzle_430};
use connections_core::puzzle::Puzzle;
use connections_core::transcript::AbortKind;
use connections_harness::config::{ProviderSpec, RunConfig};
use connections_harness::metrics::metrics_by_approach;
use connections_harness::report::{load_transcripts, report_json, REPORT_CSV, REPORT_JSON, TRANSCRIPTS_DIR};
use connections_harness::runner::{replay_dir, run_experiment};

fn write_dataset(dir: &Path, puzzles: &[Puzzle]) -> PathBuf {
    let path = dir.join("puzzles.json");
    std::fs::write(&path, to_archive_json(puzzles)).unwrap();
    path
}

fn config(dataset: PathBuf, approach: ApproachId, provider: ProviderSpec, out: PathBuf) -> RunConfig {
    RunConfig { dataset, approach: ApproachConfig::for_approach(approach), provider, parallelism: 4, seed: 3, out }
}

fn files(dir: &Path) -> BTreeMap<String, String> {
    std::fs::read_dir(dir.join(TRANSCRIPTS_DIR))
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn one_puzzle_oracle_run_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(write_dataset(dir.path(), &[puzzle_430()]), ApproachId::Vanilla, ProviderSpec::Oracle, dir.path().join("out"));
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.metrics.len(), 1);
    let m = &r.metrics[0];
    assert_eq!((m.approach.as_str(), m.puzzles, m.solved_pct, m.perfect_pct), ("vanilla", 1, 100.0, 100.0));
    assert!(r.warnings.is_empty());
    assert_eq!(r.transcripts, [dir.path().join("out").join(TRANSCRIPTS_DIR).join("vanilla-430.jsonl")]);
    assert!(dir.path().join("out").join(REPORT_JSON).is_file());
    assert!(dir.path().join("out").join(REPORT_CSV).is_file());
}

#[test]
fn provider_failure_on_one_game_is_excluded() {
    // record only #430, then replay against a dataset that also holds #1001
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec");
    let cfg = config(write_dataset(dir.path(), &[puzzle_430()]), ApproachId::Actor, ProviderSpec::Oracle, rec.clone());
    run_experiment(&cfg).unwrap();

    let two = fixture_puzzles().into_iter().filter(|p| p.id != 1002).collect::<Vec<_>>();
    let cfg = config(write_dataset(dir.path(), &two), ApproachId::Actor, ProviderSpec::Replay { dir: rec }, dir.path().join("out"));
    let r = run_experiment(&cfg).unwrap();
    let m = &r.metrics[0];
    assert_eq!((m.puzzles, m.aborted, m.solved_pct), (1, 1, 100.0));
    assert_eq!(m.aborted_games, ["actor-1001"]);
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].contains("actor-1001") && r.warnings[0].contains("excluded"));
    let ts = load_transcripts(&dir.path().join("out")).unwrap();
    assert_eq!(ts.iter().filter_map(|t| t.aborted()).map(|a| a.kind).collect::<Vec<_>>(), [AbortKind::ProviderError]);
}

#[test]
fn parallel_and_serial_runs_match() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), &fixture_puzzles());
    for a in [ApproachId::Actor2, ApproachId::CoTScripted] {
        let mut serial = config(data.clone(), a, ProviderSpec::Oracle, dir.path().join(format!("{a}-serial")));
        serial.parallelism = 1;
        let parallel = RunConfig { parallelism: 8, out: dir.path().join(format!("{a}-parallel")), ..serial.clone() };
        let s = run_experiment(&serial).unwrap();
        let p = run_experiment(&parallel).unwrap();
        assert_eq!(files(&s.out), files(&p.out));
        assert_eq!(s.metrics, p.metrics);
    }
}

#[test]
fn replaying_a_run_gives_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), &fixture_puzzles());
    let rec = run_experiment(&config(data, ApproachId::ActorO1, ProviderSpec::Oracle, dir.path().join("rec"))).unwrap();
    let (rep, identical) = replay_dir(&rec.out, &dir.path().join("rep"), 2).unwrap();
    assert_eq!(identical, 3);
    assert_eq!(rep.metrics, rec.metrics);
    assert_eq!(files(&rec.out), files(&rep.out));
    // the same through a replay provider config
    let data = dir.path().join("puzzles.json");
    let cfg = config(data, ApproachId::ActorO1, ProviderSpec::Replay { dir: rec.out.clone() }, dir.path().join("cfg-rep"));
    let again = run_experiment(&cfg).unwrap();
    assert_eq!(again.metrics, rec.metrics);
    assert_eq!(files(&again.out), files(&rec.out));
}

#[test]
fn metrics_from_disk_match_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), &fixture_puzzles());
    let r = run_experiment(&config(data, ApproachId::Oneshot, ProviderSpec::Oracle, dir.path().join("out"))).unwrap();
    let ts = load_transcripts(&r.out).unwrap();
    let recomputed = metrics_by_approach(&ts, &fixture_puzzles()).unwrap();
    assert_eq!(recomputed, r.metrics);
    assert_eq!(std::fs::read_to_string(r.out.join(REPORT_JSON)).unwrap(), report_json(&recomputed));
}

#[test]
fn missing_dataset_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let err = run_experiment(&config(missing.clone(), ApproachId::Vanilla, ProviderSpec::Oracle, dir.path().join("out")))
        .unwrap_err();
    assert!(err.to_string().contains(&missing.display().to_string()), "{err}");
}
