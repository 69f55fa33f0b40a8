//! Transcript directories and report files.

use std::path::{Path, PathBuf};

use connections_core::dataset::DifficultyBucket;
use connections_core::puzzle::Puzzle;
use connections_core::transcript::Transcript;

use crate::metrics::Metrics;
use crate::HarnessError;

pub const TRANSCRIPTS_DIR: &str = "transcripts";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

/// `dir/transcripts` when it exists, else `dir` itself.
pub fn transcripts_dir(dir: &Path) -> PathBuf {
    let nested = dir.join(TRANSCRIPTS_DIR);
    if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    }
}

pub fn transcript_path(out: &Path, t: &Transcript) -> PathBuf {
    out.join(TRANSCRIPTS_DIR).join(format!("{}.jsonl", t.header.game_id))
}

pub fn write_transcript(out: &Path, t: &Transcript) -> Result<PathBuf, HarnessError> {
    let path = transcript_path(out, t);
    std::fs::write(&path, t.to_jsonl()).map_err(HarnessError::io(&path))?;
    Ok(path)
}

/// Reads and validates every `*.jsonl` transcript, sorted by file name.
pub fn load_transcripts(dir: &Path) -> Result<Vec<Transcript>, HarnessError> {
    let dir = transcripts_dir(dir);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(HarnessError::io(&dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
            let bad = |message: String| HarnessError::Transcript { path: path.clone(), message };
            let t = Transcript::from_jsonl(&text).map_err(|e| bad(e.to_string()))?;
            t.validate().map_err(|e| bad(e.to_string()))?;
            Ok(t)
        })
        .collect()
}

/// Puzzles embedded in transcript headers, one per id.
pub fn embedded_puzzles(transcripts: &[Transcript]) -> Result<Vec<Puzzle>, HarnessError> {
    let mut out: Vec<Puzzle> = Vec::new();
    for t in transcripts {
        if out.iter().all(|p| p.id != t.puzzle_id()) {
            let p = t.puzzle().map_err(|e| HarnessError::Transcript {
                path: t.header.game_id.clone().into(),
                message: e.to_string(),
            })?;
            out.push(p);
        }
    }
    out.sort_by_key(|p| p.id);
    Ok(out)
}

pub fn report_json(metrics: &[Metrics]) -> String {
    let mut s = serde_json::to_string_pretty(metrics).expect("metrics serialize");
    s.push('\n');
    s
}

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> =
        ["approach", "puzzles", "solved_pct", "perfect_pct", "correct_total", "incorrect_total"].map(String::from).to_vec();
    h.extend(DifficultyBucket::ALL.iter().map(|b| format!("solved_pct_{}", b.label())));
    h
}

pub fn report_csv(metrics: &[Metrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header()).expect("write to memory");
    for m in metrics {
        let mut row = vec![
            m.approach.clone(),
            m.puzzles.to_string(),
            format!("{:.2}", m.solved_pct),
            format!("{:.2}", m.perfect_pct),
            m.correct_total.to_string(),
            m.incorrect_total.to_string(),
        ];
        row.extend(m.buckets.iter().map(|b| format!("{:.2}", b.solved_pct)));
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

pub fn write_reports(out: &Path, metrics: &[Metrics]) -> Result<(PathBuf, PathBuf), HarnessError> {
    std::fs::create_dir_all(out).map_err(HarnessError::io(out))?;
    let json = out.join(REPORT_JSON);
    let csv = out.join(REPORT_CSV);
    std::fs::write(&json, report_json(metrics)).map_err(HarnessError::io(&json))?;
    std::fs::write(&csv, report_csv(metrics)).map_err(HarnessError::io(&csv))?;
    Ok((json, csv))
}
