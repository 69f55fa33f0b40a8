//! Bundled fixture archive: puzzle #430 plus two invented puzzles.

use crate::dataset::load_archive;
use crate::puzzle::{Guess, Puzzle};

const ARCHIVE: &str = include_str!("../../../fixtures/archive.json");

pub fn archive_json() -> &'static str {
    ARCHIVE
}

pub fn fixture_puzzles() -> Vec<Puzzle> {
    load_archive(ARCHIVE.as_bytes()).expect("bundled fixture archive is valid")
}

pub fn puzzle_430() -> Puzzle {
    fixture_puzzles().into_iter().find(|p| p.id == 430).expect("fixture has #430")
}

/// The CARTOON CHARACTERS red herring for #430.
pub fn cartoon_herring() -> Guess {
    Guess::parse(&["BOO-BOO", "YOGI", "MICKEY", "DAISY"]).expect("valid guess")
}
