//! Puzzle archive ingestion and difficulty buckets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::puzzle::{validate_puzzle, Puzzle, PuzzleError};

/// One archive element as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleRecord {
    pub id: u32,
    pub date: String,
    pub difficulty: f64,
    pub groups: Vec<GroupRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub category: String,
    pub color: String,
    pub words: Vec<String>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("archive is not valid JSON at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid puzzle {id}: {source}")]
    Validation {
        id: u32,
        #[source]
        source: PuzzleError,
    },
    #[error("puzzle id {0} appears more than once")]
    DuplicateId(u32),
}

/// Parses a JSON array of puzzle records into validated puzzles sorted by id.
pub fn load_archive(source: &[u8]) -> Result<Vec<Puzzle>, DatasetError> {
    let records: Vec<PuzzleRecord> = serde_json::from_slice(source).map_err(|e| DatasetError::Parse {
        offset: byte_offset(source, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut ids = BTreeSet::new();
    let mut puzzles = Vec::with_capacity(records.len());
    for rec in &records {
        if !ids.insert(rec.id) {
            return Err(DatasetError::DuplicateId(rec.id));
        }
        let p = validate_puzzle(rec).map_err(|source| DatasetError::Validation { id: rec.id, source })?;
        puzzles.push(p);
    }
    puzzles.sort_by_key(|p| p.id);
    Ok(puzzles)
}

/// Serializes puzzles back into the archive format.
pub fn to_archive_json(puzzles: &[Puzzle]) -> String {
    let records: Vec<PuzzleRecord> = puzzles.iter().map(Puzzle::to_record).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

// serde_json reports 1-based line and column; column counts bytes.
fn byte_offset(source: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = source
        .split_inclusive(|b| *b == b'\n')
        .take(line - 1)
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(source.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DifficultyBucket {
    Below2_5,
    From2_5To3,
    From3To3_5,
    Above3_5,
}

impl DifficultyBucket {
    pub const ALL: [DifficultyBucket; 4] = [
        DifficultyBucket::Below2_5,
        DifficultyBucket::From2_5To3,
        DifficultyBucket::From3To3_5,
        DifficultyBucket::Above3_5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DifficultyBucket::Below2_5 => "below_2_5",
            DifficultyBucket::From2_5To3 => "2_5_to_3",
            DifficultyBucket::From3To3_5 => "3_to_3_5",
            DifficultyBucket::Above3_5 => "above_3_5",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DifficultyBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("difficulty rating must be positive, got {0}")]
pub struct NonPositiveRating(pub f64);

/// Half-open buckets: [0, 2.5), [2.5, 3), [3, 3.5), [3.5, inf).
pub fn difficulty_bucket(rating: f64) -> Result<DifficultyBucket, NonPositiveRating> {
    if rating.is_nan() || rating <= 0.0 {
        return Err(NonPositiveRating(rating));
    }
    Ok(if rating < 2.5 {
        DifficultyBucket::Below2_5
    } else if rating < 3.0 {
        DifficultyBucket::From2_5To3
    } else if rating < 3.5 {
        DifficultyBucket::From3To3_5
    } else {
        DifficultyBucket::Above3_5
    })
}

/// Puzzle counts per bucket, indexed by [`DifficultyBucket::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCounts(pub [usize; 4]);

impl BucketCounts {
    pub fn get(&self, bucket: DifficultyBucket) -> usize {
        self.0[bucket.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn dataset_summary(puzzles: &[Puzzle]) -> BucketCounts {
    let mut counts = BucketCounts::default();
    for p in puzzles {
        // validated puzzles have difficulty >= 1
        let b = difficulty_bucket(p.difficulty).expect("validated difficulty is positive");
        counts.0[b.index()] += 1;
    }
    counts
}
