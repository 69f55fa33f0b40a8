//! Scores computed from finished transcripts.

use std::collections::BTreeMap;

use connections_core::approaches::ApproachId;
use connections_core::dataset::{difficulty_bucket, DifficultyBucket};
use connections_core::puzzle::{GroupColor, Puzzle};
use connections_core::transcript::{AbortKind, Transcript};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Correct groups by color, over games with one to three correct groups.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorBreakdown {
    pub partial_games: usize,
    pub yellow: usize,
    pub green: usize,
    pub blue: usize,
    pub purple: usize,
}

impl ColorBreakdown {
    pub fn counts(&self) -> [usize; 4] {
        [self.yellow, self.green, self.blue, self.purple]
    }

    fn add(&mut self, color: GroupColor) {
        match color {
            GroupColor::Yellow => self.yellow += 1,
            GroupColor::Green => self.green += 1,
            GroupColor::Blue => self.blue += 1,
            GroupColor::Purple => self.purple += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRate {
    pub bucket: DifficultyBucket,
    pub puzzles: usize,
    pub solved: usize,
    pub solved_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub approach: String,
    /// Games counted in the percentages; provider failures are left out.
    pub puzzles: usize,
    pub solved: usize,
    pub perfect: usize,
    pub solved_pct: f64,
    pub perfect_pct: f64,
    pub correct_total: usize,
    pub incorrect_total: usize,
    /// Correct to incorrect guesses; `None` when nothing was incorrect.
    pub good_bad_ratio: Option<f64>,
    pub buckets: Vec<BucketRate>,
    pub colors: ColorBreakdown,
    /// Every aborted game, including provider failures.
    pub aborted: usize,
    pub aborted_games: Vec<String>,
}

pub fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 * 100.0 / whole as f64
    }
}

fn puzzle_for<'a>(t: &Transcript, dataset: &'a [Puzzle]) -> Result<&'a Puzzle, HarnessError> {
    let id = t.puzzle_id();
    dataset.iter().find(|p| p.id == id).ok_or(HarnessError::UnknownPuzzleId(id))
}

fn counted(t: &Transcript) -> bool {
    t.aborted().is_none_or(|a| a.kind != AbortKind::ProviderError)
}

/// Color tally over games that ended with one to three correct groups.
pub fn color_breakdown(transcripts: &[Transcript], dataset: &[Puzzle]) -> Result<ColorBreakdown, HarnessError> {
    let mut out = ColorBreakdown::default();
    for t in transcripts {
        puzzle_for(t, dataset)?;
        if !counted(t) {
            continue;
        }
        let colors = t.correct_colors();
        if (1..=3).contains(&colors.len()) {
            out.partial_games += 1;
            colors.into_iter().for_each(|c| out.add(c));
        }
    }
    Ok(out)
}

pub fn compute_metrics(
    approach: &str,
    transcripts: &[Transcript],
    dataset: &[Puzzle],
) -> Result<Metrics, HarnessError> {
    let mut m = Metrics {
        approach: approach.to_string(),
        puzzles: 0,
        solved: 0,
        perfect: 0,
        solved_pct: 0.0,
        perfect_pct: 0.0,
        correct_total: 0,
        incorrect_total: 0,
        good_bad_ratio: None,
        buckets: Vec::new(),
        colors: color_breakdown(transcripts, dataset)?,
        aborted: 0,
        aborted_games: Vec::new(),
    };
    let mut buckets = [(0usize, 0usize); 4];
    for t in transcripts {
        let puzzle = puzzle_for(t, dataset)?;
        if t.aborted().is_some() {
            m.aborted += 1;
            m.aborted_games.push(t.header.game_id.clone());
        }
        if !counted(t) {
            continue;
        }
        let score = t.score().ok_or_else(|| HarnessError::Transcript {
            path: t.header.game_id.clone().into(),
            message: "game never ended".into(),
        })?;
        let solved = score.solved && t.aborted().is_none();
        m.puzzles += 1;
        m.solved += solved as usize;
        m.perfect += (solved && score.perfect) as usize;
        m.correct_total += score.correct_count;
        m.incorrect_total += score.incorrect_count;
        let b = difficulty_bucket(puzzle.difficulty).expect("validated difficulty");
        buckets[b.index()].0 += 1;
        buckets[b.index()].1 += solved as usize;
    }
    m.solved_pct = pct(m.solved, m.puzzles);
    m.perfect_pct = pct(m.perfect, m.puzzles);
    m.good_bad_ratio = (m.incorrect_total > 0).then(|| m.correct_total as f64 / m.incorrect_total as f64);
    m.buckets = DifficultyBucket::ALL
        .iter()
        .map(|&bucket| {
            let (puzzles, solved) = buckets[bucket.index()];
            BucketRate { bucket, puzzles, solved, solved_pct: pct(solved, puzzles) }
        })
        .collect();
    m.aborted_games.sort();
    Ok(m)
}

/// One [`Metrics`] per approach present, in the canonical approach order.
pub fn metrics_by_approach(transcripts: &[Transcript], dataset: &[Puzzle]) -> Result<Vec<Metrics>, HarnessError> {
    let mut groups: BTreeMap<ApproachId, Vec<Transcript>> = BTreeMap::new();
    for t in transcripts {
        groups.entry(t.header.config.approach).or_default().push(t.clone());
    }
    groups.iter().map(|(a, ts)| compute_metrics(a.name(), ts, dataset)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{synthetic_game, SyntheticEnd};
    use connections_core::fixtures::puzzle_430;
    use GroupColor::*;

    fn won(perfect: bool) -> Transcript {
        synthetic_game(&puzzle_430(), ApproachId::Vanilla, &[Yellow, Green, Blue], if perfect { 0 } else { 1 }, SyntheticEnd::Finished)
    }

    #[test]
    fn solved_and_perfect_percentages() {
        let lost = synthetic_game(&puzzle_430(), ApproachId::Vanilla, &[Yellow], 4, SyntheticEnd::Finished);
        let ts = vec![won(true), won(false), lost.clone(), lost];
        let m = compute_metrics("vanilla", &ts, &[puzzle_430()]).unwrap();
        assert_eq!((m.solved_pct, m.perfect_pct), (50.0, 25.0));
    }

    #[test]
    fn good_bad_ratio() {
        // 3 wins with 4 correct and 2 incorrect each
        let g = synthetic_game(&puzzle_430(), ApproachId::Vanilla, &[Yellow, Green, Blue], 2, SyntheticEnd::Finished);
        let m = compute_metrics("vanilla", &[g.clone(), g.clone(), g], &[puzzle_430()]).unwrap();
        assert_eq!((m.correct_total, m.incorrect_total), (12, 6));
        assert_eq!(m.good_bad_ratio, Some(2.0));
    }

    #[test]
    fn color_examples() {
        let partial = synthetic_game(&puzzle_430(), ApproachId::Actor, &[Yellow, Green], 4, SyntheticEnd::Finished);
        let c = color_breakdown(&[partial], &[puzzle_430()]).unwrap();
        assert_eq!(c.counts(), [1, 1, 0, 0]);
        let c = color_breakdown(&[won(true)], &[puzzle_430()]).unwrap();
        assert_eq!(c.counts(), [0, 0, 0, 0]);
    }

    #[test]
    fn unknown_puzzle_is_an_error() {
        let mut other = puzzle_430();
        other.id = 9;
        assert!(matches!(compute_metrics("x", &[won(true)], &[other]), Err(HarnessError::UnknownPuzzleId(430))));
    }

    #[test]
    fn aborts() {
        let cap = synthetic_game(&puzzle_430(), ApproachId::Vanilla, &[], 0, SyntheticEnd::Aborted(AbortKind::RestartCap));
        let failed = synthetic_game(&puzzle_430(), ApproachId::Vanilla, &[], 0, SyntheticEnd::Aborted(AbortKind::ProviderError));
        let m = compute_metrics("vanilla", &[won(true), cap, failed], &[puzzle_430()]).unwrap();
        assert_eq!((m.puzzles, m.solved, m.aborted), (2, 1, 2));
        assert_eq!(m.solved_pct, 50.0);
    }
}
