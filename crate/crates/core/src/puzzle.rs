//! Domain types and the game state machine.
//!
//! A [`Puzzle`] is sixteen words partitioned into four colour-labelled
//! groups. A [`GameState`] tracks one play-through: which words remain,
//! which guesses were correct or incorrect, and whether the game is over.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{GroupRecord, PuzzleRecord};

pub const GROUP_SIZE: usize = 4;
pub const GROUP_COUNT: usize = 4;
pub const WORD_COUNT: usize = GROUP_SIZE * GROUP_COUNT;
/// Number of incorrect submissions that ends a game.
pub const MAX_INCORRECT: usize = 4;

/// A puzzle word in canonical form: uppercase, trimmed, single internal spaces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(String);

impl Word {
    pub fn new(raw: &str) -> Result<Self, WordError> {
        let canonical = raw.split_whitespace().collect::<Vec<_>>().join(" ").to_uppercase();
        if canonical.is_empty() {
            return Err(WordError::Empty);
        }
        Ok(Word(canonical))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("word is empty after trimming")]
    Empty,
}

impl TryFrom<String> for Word {
    type Error = WordError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Word::new(&value)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.0
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::new(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Group colour; the derived order is the difficulty order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupColor {
    Yellow,
    Green,
    Blue,
    Purple,
}

impl GroupColor {
    pub const ALL: [GroupColor; 4] = [
        GroupColor::Yellow,
        GroupColor::Green,
        GroupColor::Blue,
        GroupColor::Purple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupColor::Yellow => "yellow",
            GroupColor::Green => "green",
            GroupColor::Blue => "blue",
            GroupColor::Purple => "purple",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for GroupColor {
    type Err = PuzzleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yellow" => Ok(GroupColor::Yellow),
            "green" => Ok(GroupColor::Green),
            "blue" => Ok(GroupColor::Blue),
            "purple" => Ok(GroupColor::Purple),
            _ => Err(PuzzleError::UnknownColor(s.to_string())),
        }
    }
}

impl fmt::Display for GroupColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Four distinct words. Stored sorted, so equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Word>", into = "Vec<Word>")]
pub struct Guess([Word; GROUP_SIZE]);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("a guess needs exactly 4 words, got {0}")]
    WrongSize(usize),
    #[error("word {0} appears more than once")]
    DuplicateWord(Word),
}

impl Guess {
    pub fn new<I>(words: I) -> Result<Self, GuessError>
    where
        I: IntoIterator<Item = Word>,
    {
        let mut words: Vec<Word> = words.into_iter().collect();
        if words.len() != GROUP_SIZE {
            return Err(GuessError::WrongSize(words.len()));
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(GuessError::DuplicateWord(pair[0].clone()));
        }
        let arr: [Word; GROUP_SIZE] = words.try_into().expect("length checked");
        Ok(Guess(arr))
    }

    /// Builds a guess from raw strings, canonicalizing each.
    pub fn parse<S: AsRef<str>>(words: &[S]) -> Result<Self, GuessError> {
        let words = words
            .iter()
            .map(|w| Word::new(w.as_ref()).map_err(|_| GuessError::WrongSize(words.len())))
            .collect::<Result<Vec<_>, _>>()?;
        Guess::new(words)
    }

    pub fn words(&self) -> &[Word; GROUP_SIZE] {
        &self.0
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.0.binary_search(word).is_ok()
    }

    pub fn overlaps(&self, other: &Guess) -> bool {
        self.0.iter().any(|w| other.contains(w))
    }
}

impl TryFrom<Vec<Word>> for Guess {
    type Error = GuessError;

    fn try_from(value: Vec<Word>) -> Result<Self, Self::Error> {
        Guess::new(value)
    }
}

impl From<Guess> for Vec<Word> {
    fn from(g: Guess) -> Vec<Word> {
        g.0.into()
    }
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "{a}, {b}, {c}, {d}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionGroup {
    pub category: String,
    pub color: GroupColor,
    pub words: Guess,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PuzzleError {
    #[error("puzzle {id}: word {word} appears in more than one group")]
    DuplicateWord { id: u32, word: Word },
    #[error("puzzle {id}: expected 4 groups, found {found}")]
    WrongGroupCount { id: u32, found: usize },
    #[error("puzzle {id}: group {category:?} has {found} distinct words, expected 4")]
    WrongGroupSize { id: u32, category: String, found: usize },
    #[error("puzzle {id}: no group has color {color}")]
    MissingColor { id: u32, color: GroupColor },
    #[error("puzzle {id}: difficulty {value} outside [1.0, 5.0]")]
    DifficultyOutOfRange { id: u32, value: f64 },
    #[error("unknown group color {0:?}")]
    UnknownColor(String),
    #[error("puzzle {id}: group {category:?} contains an empty word")]
    EmptyWord { id: u32, category: String },
    #[error("puzzle {id}: date {value:?} is not YYYY-MM-DD")]
    InvalidDate { id: u32, value: String },
    #[error("word {0} is not in the puzzle")]
    WordNotInPuzzle(Word),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PuzzleRecord", into = "PuzzleRecord")]
pub struct Puzzle {
    pub id: u32,
    pub date: NaiveDate,
    pub difficulty: f64,
    /// One group per colour, in colour order.
    pub groups: [SolutionGroup; GROUP_COUNT],
}

/// Checks a raw record and returns the canonical puzzle.
pub fn validate_puzzle(record: &PuzzleRecord) -> Result<Puzzle, PuzzleError> {
    let id = record.id;
    if record.groups.len() != GROUP_COUNT {
        return Err(PuzzleError::WrongGroupCount { id, found: record.groups.len() });
    }
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut groups: Vec<SolutionGroup> = Vec::with_capacity(GROUP_COUNT);
    for g in &record.groups {
        let color: GroupColor = g.color.parse()?;
        let mut words = BTreeSet::new();
        for raw in &g.words {
            let w = Word::new(raw).map_err(|_| PuzzleError::EmptyWord {
                id,
                category: g.category.clone(),
            })?;
            words.insert(w);
        }
        if words.len() != GROUP_SIZE || g.words.len() != GROUP_SIZE {
            return Err(PuzzleError::WrongGroupSize {
                id,
                category: g.category.clone(),
                found: words.len(),
            });
        }
        for w in &words {
            if !seen.insert(w.clone()) {
                return Err(PuzzleError::DuplicateWord { id, word: w.clone() });
            }
        }
        groups.push(SolutionGroup {
            category: g.category.trim().to_string(),
            color,
            words: Guess::new(words).expect("four distinct words"),
        });
    }
    for color in GroupColor::ALL {
        if !groups.iter().any(|g| g.color == color) {
            return Err(PuzzleError::MissingColor { id, color });
        }
    }
    if !(1.0..=5.0).contains(&record.difficulty) {
        return Err(PuzzleError::DifficultyOutOfRange { id, value: record.difficulty });
    }
    let date = NaiveDate::parse_from_str(record.date.trim(), "%Y-%m-%d").map_err(|_| {
        PuzzleError::InvalidDate { id, value: record.date.clone() }
    })?;
    groups.sort_by_key(|g| g.color);
    let groups: [SolutionGroup; GROUP_COUNT] = groups.try_into().expect("four groups");
    Ok(Puzzle { id, date, difficulty: record.difficulty, groups })
}

impl TryFrom<PuzzleRecord> for Puzzle {
    type Error = PuzzleError;

    fn try_from(value: PuzzleRecord) -> Result<Self, Self::Error> {
        validate_puzzle(&value)
    }
}

impl From<Puzzle> for PuzzleRecord {
    fn from(p: Puzzle) -> PuzzleRecord {
        p.to_record()
    }
}

impl Puzzle {
    pub fn to_record(&self) -> PuzzleRecord {
        PuzzleRecord {
            id: self.id,
            date: self.date.format("%Y-%m-%d").to_string(),
            difficulty: self.difficulty,
            groups: self
                .groups
                .iter()
                .map(|g| GroupRecord {
                    category: g.category.clone(),
                    color: g.color.name().to_string(),
                    words: g.words.words().iter().map(|w| w.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// All sixteen words, sorted.
    pub fn words(&self) -> BTreeSet<Word> {
        self.groups.iter().flat_map(|g| g.words.words().iter().cloned()).collect()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.groups.iter().any(|g| g.words.contains(word))
    }

    pub fn group(&self, color: GroupColor) -> &SolutionGroup {
        &self.groups[color.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuessOutcome {
    Correct(GroupColor),
    Incorrect,
}

/// Grades a guess against the solution. Pure.
pub fn check_guess(puzzle: &Puzzle, guess: &Guess) -> Result<GuessOutcome, PuzzleError> {
    if let Some(w) = guess.words().iter().find(|w| !puzzle.contains(w)) {
        return Err(PuzzleError::WordNotInPuzzle(w.clone()));
    }
    Ok(puzzle
        .groups
        .iter()
        .find(|g| &g.words == guess)
        .map_or(GuessOutcome::Incorrect, |g| GuessOutcome::Correct(g.color)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    InProgress,
    Won,
    Lost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "word", rename_all = "snake_case")]
pub enum InvalidReason {
    NotInRemaining(Word),
    RepeatedIncorrect,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::NotInRemaining(w) => write!(f, "{w} is not among the remaining words"),
            InvalidReason::RepeatedIncorrect => f.write_str("guess was already submitted and is incorrect"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubmissionResult {
    Correct(GroupColor),
    Incorrect,
    Invalid(InvalidReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("the game is already over")]
    GameOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameScore {
    pub solved: bool,
    pub perfect: bool,
    pub correct_count: usize,
    pub incorrect_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    puzzle: Puzzle,
    remaining: BTreeSet<Word>,
    correct: Vec<(Guess, GroupColor)>,
    incorrect: Vec<Guess>,
    status: GameStatus,
}

impl GameState {
    pub fn new(puzzle: Puzzle) -> Self {
        let remaining = puzzle.words();
        GameState {
            puzzle,
            remaining,
            correct: Vec::new(),
            incorrect: Vec::new(),
            status: GameStatus::InProgress,
        }
    }

    pub fn puzzle(&self) -> &Puzzle {
        &self.puzzle
    }

    pub fn remaining(&self) -> &BTreeSet<Word> {
        &self.remaining
    }

    pub fn correct(&self) -> &[(Guess, GroupColor)] {
        &self.correct
    }

    pub fn incorrect(&self) -> &[Guess] {
        &self.incorrect
    }

    pub fn status(&self) -> GameStatus {
        self.status
    }

    pub fn is_over(&self) -> bool {
        self.status != GameStatus::InProgress
    }

    /// Groups solved so far, in solve order.
    pub fn solved_groups(&self) -> Vec<SolutionGroup> {
        self.correct.iter().map(|(_, c)| self.puzzle.group(*c).clone()).collect()
    }

    /// Checks the pre-submission validity rules without changing state.
    pub fn validity(&self, guess: &Guess) -> Result<(), InvalidReason> {
        if let Some(w) = guess.words().iter().find(|w| !self.remaining.contains(*w)) {
            return Err(InvalidReason::NotInRemaining(w.clone()));
        }
        if self.incorrect.contains(guess) {
            return Err(InvalidReason::RepeatedIncorrect);
        }
        Ok(())
    }

    pub fn submit_guess(&mut self, guess: &Guess) -> Result<SubmissionResult, GameError> {
        if self.is_over() {
            return Err(GameError::GameOver);
        }
        if let Err(reason) = self.validity(guess) {
            return Ok(SubmissionResult::Invalid(reason));
        }
        let outcome = check_guess(&self.puzzle, guess).expect("remaining words belong to the puzzle");
        Ok(match outcome {
            GuessOutcome::Correct(color) => {
                for w in guess.words() {
                    self.remaining.remove(w);
                }
                self.correct.push((guess.clone(), color));
                if self.correct.len() == GROUP_COUNT {
                    self.status = GameStatus::Won;
                }
                SubmissionResult::Correct(color)
            }
            GuessOutcome::Incorrect => {
                self.incorrect.push(guess.clone());
                if self.incorrect.len() == MAX_INCORRECT {
                    self.status = GameStatus::Lost;
                }
                SubmissionResult::Incorrect
            }
        })
    }

    /// Submits the last group once three are solved. Returns the group
    /// submitted, if any.
    pub fn auto_complete(&mut self) -> Option<(Guess, GroupColor)> {
        if self.status != GameStatus::InProgress || self.correct.len() != GROUP_COUNT - 1 {
            return None;
        }
        let last = Guess::new(self.remaining.iter().cloned()).expect("four words remain");
        match self.submit_guess(&last) {
            Ok(SubmissionResult::Correct(color)) => Some((last, color)),
            other => unreachable!("elimination guess must be correct, got {other:?}"),
        }
    }

    pub fn score(&self) -> GameScore {
        game_score(self)
    }
}

pub fn game_score(state: &GameState) -> GameScore {
    let solved = state.status == GameStatus::Won;
    GameScore {
        solved,
        perfect: solved && state.incorrect.is_empty(),
        correct_count: state.correct.len(),
        incorrect_count: state.incorrect.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::puzzle_430;

    fn g(words: &[&str]) -> Guess {
        Guess::parse(words).unwrap()
    }

    #[test]
    fn word_canonicalization() {
        assert_eq!(Word::new("  boo-boo ").unwrap().as_str(), "BOO-BOO");
        assert_eq!(Word::new("ice \t  cream").unwrap().as_str(), "ICE CREAM");
        assert_eq!(Word::new("   "), Err(WordError::Empty));
        assert_eq!(Word::new("Goof"), Word::new("GOOF"));
    }

    #[test]
    fn color_order_is_difficulty_order() {
        assert!(GroupColor::Yellow < GroupColor::Green);
        assert!(GroupColor::Green < GroupColor::Blue);
        assert!(GroupColor::Blue < GroupColor::Purple);
    }

    #[test]
    fn guess_rejects_duplicates_and_wrong_size() {
        assert!(matches!(Guess::parse(&["A", "B", "C"]), Err(GuessError::WrongSize(3))));
        assert!(matches!(Guess::parse(&["A", "b", "B", "C"]), Err(GuessError::DuplicateWord(_))));
        assert_eq!(g(&["GOOF", "FLUB", "GAFFE", "BOO-BOO"]), g(&["boo-boo", "gaffe", "flub", "goof"]));
    }

    #[test]
    fn validate_430() {
        let p = puzzle_430();
        assert_eq!(p.id, 430);
        let cats: Vec<_> = p.groups.iter().map(|g| g.category.as_str()).collect();
        assert_eq!(cats, ["BLUNDER", "FLOWERS", "THINGS BEES DO", "FIRST NAMES OF YANKEES LEGENDS"]);
        assert_eq!(p.words().len(), 16);
    }

    #[test]
    fn validate_errors() {
        let mut rec = puzzle_430().to_record();
        rec.groups[1].words[0] = "MICKEY".into();
        assert!(matches!(validate_puzzle(&rec), Err(PuzzleError::DuplicateWord { id: 430, .. })));

        let mut rec = puzzle_430().to_record();
        rec.groups.pop();
        assert_eq!(validate_puzzle(&rec), Err(PuzzleError::WrongGroupCount { id: 430, found: 3 }));

        let mut rec = puzzle_430().to_record();
        rec.groups[2].words.pop();
        assert!(matches!(validate_puzzle(&rec), Err(PuzzleError::WrongGroupSize { found: 3, .. })));

        let mut rec = puzzle_430().to_record();
        rec.groups[3].color = "blue".into();
        assert_eq!(
            validate_puzzle(&rec),
            Err(PuzzleError::MissingColor { id: 430, color: GroupColor::Purple })
        );

        let mut rec = puzzle_430().to_record();
        rec.difficulty = 5.5;
        assert!(matches!(validate_puzzle(&rec), Err(PuzzleError::DifficultyOutOfRange { .. })));

        let mut rec = puzzle_430().to_record();
        rec.date = "14/08/2024".into();
        assert!(matches!(validate_puzzle(&rec), Err(PuzzleError::InvalidDate { .. })));
    }

    #[test]
    fn check_guess_examples() {
        let p = puzzle_430();
        assert_eq!(
            check_guess(&p, &g(&["BOO-BOO", "FLUB", "GAFFE", "GOOF"])),
            Ok(GuessOutcome::Correct(GroupColor::Yellow))
        );
        assert_eq!(
            check_guess(&p, &g(&["BOO-BOO", "YOGI", "MICKEY", "DAISY"])),
            Ok(GuessOutcome::Incorrect)
        );
        assert_eq!(
            check_guess(&p, &g(&["POPPY", "PETUNIA", "DAISY", "JASMINE"])),
            Ok(GuessOutcome::Correct(GroupColor::Green))
        );
        assert!(matches!(
            check_guess(&p, &g(&["BOO-BOO", "FLUB", "GAFFE", "OOPS"])),
            Err(PuzzleError::WordNotInPuzzle(_))
        ));
    }

    #[test]
    fn submit_guess_examples() {
        let mut s = GameState::new(puzzle_430());
        let herring = g(&["MICKEY", "DAISY", "BUZZ", "GOOF"]);
        assert_eq!(s.submit_guess(&herring), Ok(SubmissionResult::Incorrect));
        assert_eq!(s.remaining().len(), 16);
        assert_eq!(s.incorrect().len(), 1);

        let before = s.clone();
        let permuted = g(&["GOOF", "BUZZ", "MICKEY", "DAISY"]);
        assert_eq!(
            s.submit_guess(&permuted),
            Ok(SubmissionResult::Invalid(InvalidReason::RepeatedIncorrect))
        );
        assert_eq!(s, before);

        assert_eq!(
            s.submit_guess(&g(&["BOO-BOO", "FLUB", "GAFFE", "GOOF"])),
            Ok(SubmissionResult::Correct(GroupColor::Yellow))
        );
        assert!(matches!(
            s.submit_guess(&g(&["GOOF", "DANCE", "LOU", "BABE"])),
            Ok(SubmissionResult::Invalid(InvalidReason::NotInRemaining(_)))
        ));
    }

    #[test]
    fn game_over_is_an_error() {
        let p = puzzle_430();
        let mut s = GameState::new(p.clone());
        for grp in &p.groups {
            s.submit_guess(&grp.words).unwrap();
        }
        assert_eq!(s.status(), GameStatus::Won);
        assert_eq!(s.submit_guess(&p.groups[0].words), Err(GameError::GameOver));
    }

    #[test]
    fn auto_complete_cases() {
        let p = puzzle_430();
        let mut s = GameState::new(p.clone());
        for grp in &p.groups[..2] {
            s.submit_guess(&grp.words).unwrap();
        }
        let before = s.clone();
        assert_eq!(s.auto_complete(), None);
        assert_eq!(s, before);

        s.submit_guess(&p.groups[2].words).unwrap();
        assert_eq!(s.auto_complete().map(|(_, c)| c), Some(GroupColor::Purple));
        assert_eq!(s.score(), GameScore { solved: true, perfect: true, correct_count: 4, incorrect_count: 0 });
        let done = s.clone();
        assert_eq!(s.auto_complete(), None);
        assert_eq!(s, done);

        let mut s = GameState::new(p.clone());
        s.submit_guess(&g(&["MICKEY", "DAISY", "BUZZ", "GOOF"])).unwrap();
        s.submit_guess(&g(&["BOO-BOO", "YOGI", "MICKEY", "DAISY"])).unwrap();
        for grp in &p.groups[..3] {
            s.submit_guess(&grp.words).unwrap();
        }
        s.auto_complete();
        assert_eq!(s.score(), GameScore { solved: true, perfect: false, correct_count: 4, incorrect_count: 2 });
    }

    #[test]
    fn score_examples() {
        let p = puzzle_430();
        let mut s = GameState::new(p.clone());
        s.submit_guess(&g(&["MICKEY", "DAISY", "BUZZ", "GOOF"])).unwrap();
        for grp in &p.groups {
            s.submit_guess(&grp.words).unwrap();
        }
        assert_eq!(s.score(), GameScore { solved: true, perfect: false, correct_count: 4, incorrect_count: 1 });

        let mut s = GameState::new(p.clone());
        s.submit_guess(&p.groups[0].words).unwrap();
        s.submit_guess(&p.groups[1].words).unwrap();
        for bad in [
            ["BUZZ", "LOU", "DANCE", "BABE"],
            ["BUZZ", "LOU", "DANCE", "YOGI"],
            ["BUZZ", "LOU", "STING", "YOGI"],
            ["BUZZ", "MICKEY", "STING", "YOGI"],
        ] {
            assert_eq!(s.submit_guess(&g(&bad)), Ok(SubmissionResult::Incorrect));
        }
        assert_eq!(s.status(), GameStatus::Lost);
        assert_eq!(s.score(), GameScore { solved: false, perfect: false, correct_count: 2, incorrect_count: 4 });
    }
}
