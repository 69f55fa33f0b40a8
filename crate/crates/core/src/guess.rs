//! Guess parsing and the deterministic machinery around LLM choices: the
//! final-guesses list and its submission gates, mole words, and word
//! removal for answer diversity.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::puzzle::{Guess, SolutionGroup, Word, GROUP_SIZE};

pub const ABSTAIN_SENTENCE: &str = "I can't identify a good guess to submit.";

/// Lowest word count diversity removal may leave behind.
pub const DIVERSITY_FLOOR: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum MalformedReason {
    NoContent,
    WrongCount(usize),
    UnknownWord(String),
    DuplicateWord(String),
    MissingDecision,
}

impl fmt::Display for MalformedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MalformedReason::NoContent => f.write_str("no content"),
            MalformedReason::WrongCount(n) => write!(f, "wrong count {n}"),
            MalformedReason::UnknownWord(w) => write!(f, "{w:?} is not an available word"),
            MalformedReason::DuplicateWord(w) => write!(f, "{w:?} repeated"),
            MalformedReason::MissingDecision => f.write_str("no SUBMIT or CONTINUE line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ParsedGuess {
    Guess(Guess),
    Abstain,
    Malformed(MalformedReason),
}

fn normalize_quotes(text: &str) -> String {
    text.replace(['\u{2018}', '\u{2019}'], "'")
}

pub fn is_abstain(text: &str) -> bool {
    let needle = ABSTAIN_SENTENCE.trim_end_matches('.').to_lowercase();
    normalize_quotes(text).to_lowercase().contains(&needle)
}

fn strip_token(tok: &str) -> &str {
    tok.trim_matches(|c: char| {
        c.is_whitespace()
            || matches!(c, '*' | '"' | '\'' | '`' | '.' | '\u{201c}' | '\u{201d}' | '[' | ']' | '(' | ')')
    })
}

/// Parses one line of comma-separated words, with an optional `label:` prefix.
pub fn parse_guess_line(line: &str, available: &BTreeSet<Word>) -> Result<Guess, MalformedReason> {
    let body = match line.rfind(':') {
        Some(i) => &line[i + 1..],
        None => line,
    };
    let tokens: Vec<&str> = body.split(',').map(strip_token).collect();
    if tokens.len() != GROUP_SIZE {
        return Err(MalformedReason::WrongCount(tokens.len()));
    }
    let mut words = Vec::with_capacity(GROUP_SIZE);
    for tok in tokens {
        let w = Word::new(tok).map_err(|_| MalformedReason::UnknownWord(tok.to_string()))?;
        if !available.contains(&w) {
            return Err(MalformedReason::UnknownWord(tok.to_string()));
        }
        if words.contains(&w) {
            return Err(MalformedReason::DuplicateWord(tok.to_string()));
        }
        words.push(w);
    }
    Ok(Guess::new(words).expect("four distinct words"))
}

fn last_line(text: &str) -> Option<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).last()
}

/// Reads a guess from the final non-empty line of a formatting response.
pub fn parse_guess(text: &str, available: &BTreeSet<Word>) -> ParsedGuess {
    if is_abstain(text) {
        return ParsedGuess::Abstain;
    }
    match last_line(text) {
        None => ParsedGuess::Malformed(MalformedReason::NoContent),
        Some(line) => match parse_guess_line(line, available) {
            Ok(g) => ParsedGuess::Guess(g),
            Err(r) => ParsedGuess::Malformed(r),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ParsedDecision {
    Submit(Guess),
    Continue,
    Malformed(MalformedReason),
}

/// Reads a decide-stage formatting response: a guess line followed by a
/// final `SUBMIT`, or a final `CONTINUE`.
pub fn parse_decision(text: &str, available: &BTreeSet<Word>) -> ParsedDecision {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let Some((last, before)) = lines.split_last() else {
        return ParsedDecision::Malformed(MalformedReason::NoContent);
    };
    match strip_token(last).to_ascii_uppercase().as_str() {
        "CONTINUE" => ParsedDecision::Continue,
        "SUBMIT" => match before.last() {
            None => ParsedDecision::Malformed(MalformedReason::NoContent),
            Some(line) => match parse_guess_line(line, available) {
                Ok(g) => ParsedDecision::Submit(g),
                Err(r) => ParsedDecision::Malformed(r),
            },
        },
        _ => ParsedDecision::Malformed(MalformedReason::MissingDecision),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalEntry {
    pub guess: Guess,
    pub count: usize,
    first_seq: usize,
    thrice_seq: Option<usize>,
}

/// Multiset of LLM-chosen guesses awaiting a deterministic release rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalGuessList {
    entries: Vec<FinalEntry>,
    processed: usize,
}

impl FinalGuessList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one occurrence and returns the guess's new count.
    pub fn append(&mut self, guess: Guess) -> usize {
        let seq = self.processed;
        self.processed += 1;
        if let Some(e) = self.entries.iter_mut().find(|e| e.guess == guess) {
            e.count += 1;
            if e.count == 3 {
                e.thrice_seq = Some(seq);
            }
            return e.count;
        }
        self.entries.push(FinalEntry { guess, count: 1, first_seq: seq, thrice_seq: None });
        1
    }

    /// Every append ever made, duplicates included.
    pub fn processed_count(&self) -> usize {
        self.processed
    }

    pub fn entries(&self) -> &[FinalEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, guess: &Guess) -> usize {
        self.entries.iter().find(|e| &e.guess == guess).map_or(0, |e| e.count)
    }

    /// Drops entries that no longer satisfy `keep`; the processed count is unaffected.
    pub fn retain(&mut self, mut keep: impl FnMut(&Guess) -> bool) {
        self.entries.retain(|e| keep(&e.guess));
    }

    pub fn remove(&mut self, guess: &Guess) {
        self.entries.retain(|e| &e.guess != guess);
    }

    /// The guess that reached three occurrences first.
    pub fn thrice_repeated(&self) -> Option<&Guess> {
        self.entries
            .iter()
            .filter(|e| e.count >= 3)
            .min_by_key(|e| e.thrice_seq.unwrap_or(e.first_seq))
            .map(|e| &e.guess)
    }

    /// The first (by append order) set of `k` entries with pairwise
    /// disjoint words.
    pub fn find_disjoint(&self, k: usize) -> Option<Vec<Guess>> {
        if k == 0 {
            return Some(Vec::new());
        }
        let mut chosen = Vec::with_capacity(k);
        self.disjoint_from(0, k, &mut chosen)
            .then(|| chosen.iter().map(|&i| self.entries[i].guess.clone()).collect())
    }

    fn disjoint_from(&self, start: usize, k: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == k {
            return true;
        }
        let needed = k - chosen.len();
        for i in start..self.entries.len() {
            if self.entries.len() - i < needed {
                break;
            }
            let g = &self.entries[i].guess;
            if chosen.iter().all(|&c| !self.entries[c].guess.overlaps(g)) {
                chosen.push(i);
                if self.disjoint_from(i + 1, k, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
}

/// Which release rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateRule {
    Quadruplet,
    Triplet,
    Pair,
    Thrice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubmissionDecision {
    Submit { rule: GateRule, guesses: Vec<Guess> },
    Wait,
}

fn pairwise_disjoint(gs: &[Guess]) -> bool {
    gs.iter().enumerate().all(|(i, a)| gs[i + 1..].iter().all(|b| !a.overlaps(b)))
}

fn submit(rule: GateRule, guesses: Vec<Guess>) -> SubmissionDecision {
    assert!(pairwise_disjoint(&guesses), "gate released overlapping guesses");
    SubmissionDecision::Submit { rule, guesses }
}

/// Unique pair first, then the three-repeat rule.
pub fn actor2_decide(list: &FinalGuessList) -> SubmissionDecision {
    if let Some(pair) = list.find_disjoint(2) {
        return submit(GateRule::Pair, pair);
    }
    if let Some(g) = list.thrice_repeated() {
        return submit(GateRule::Thrice, vec![g.clone()]);
    }
    SubmissionDecision::Wait
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct O1Thresholds {
    /// Triplets are released once at least this many guesses were processed.
    pub triplet_min: usize,
    /// Pairs are released once more than this many guesses were processed.
    pub pair_above: usize,
}

impl Default for O1Thresholds {
    fn default() -> Self {
        O1Thresholds { triplet_min: 13, pair_above: 15 }
    }
}

pub fn actor_o1_decide(list: &FinalGuessList, th: O1Thresholds) -> SubmissionDecision {
    if let Some(quad) = list.find_disjoint(4) {
        return submit(GateRule::Quadruplet, quad);
    }
    let processed = list.processed_count();
    if processed >= th.triplet_min {
        if let Some(tri) = list.find_disjoint(3) {
            return submit(GateRule::Triplet, tri);
        }
    }
    if processed > th.pair_above {
        if let Some(pair) = list.find_disjoint(2) {
            return submit(GateRule::Pair, pair);
        }
    }
    if let Some(g) = list.thrice_repeated() {
        return submit(GateRule::Thrice, vec![g.clone()]);
    }
    SubmissionDecision::Wait
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleSet {
    pub moles: BTreeSet<Word>,
    pub rng_seed: u64,
}

impl MoleSet {
    pub fn empty(rng_seed: u64) -> Self {
        MoleSet { moles: BTreeSet::new(), rng_seed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoleError {
    #[error("no solved groups to draw mole words from")]
    NoSolvedGroups,
    #[error("asked for {requested} moles but only {available} solved words exist")]
    CountTooLarge { requested: usize, available: usize },
}

/// Adds `count` words from solved groups to the candidate list and shuffles it.
pub fn inject_moles(
    remaining: &BTreeSet<Word>,
    solved: &[SolutionGroup],
    count: usize,
    seed: u64,
) -> Result<(Vec<Word>, MoleSet), MoleError> {
    if count == 0 {
        return Ok((remaining.iter().cloned().collect(), MoleSet::empty(seed)));
    }
    if solved.is_empty() {
        return Err(MoleError::NoSolvedGroups);
    }
    let pool: Vec<Word> = solved
        .iter()
        .flat_map(|g| g.words.words().iter().cloned())
        .filter(|w| !remaining.contains(w))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if count > pool.len() {
        return Err(MoleError::CountTooLarge { requested: count, available: pool.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moles: BTreeSet<Word> = pool.choose_multiple(&mut rng, count).cloned().collect();
    let mut list: Vec<Word> = remaining.iter().chain(moles.iter()).cloned().collect();
    list.shuffle(&mut rng);
    Ok((list, MoleSet { moles, rng_seed: seed }))
}

pub fn mole_reject(guess: &Guess, moles: &MoleSet) -> bool {
    guess.words().iter().any(|w| moles.moles.contains(w))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityPolicy {
    Off,
    /// Remove on every second brainstorm round.
    #[default]
    Alternate,
    /// Remove on a seeded coin flip each round.
    Coin,
}

/// Word list for a brainstorm round, with words from listed and pending
/// guesses held back when the policy says so.
pub fn diversity_remove(
    remaining: &BTreeSet<Word>,
    final_list: &FinalGuessList,
    pending: &[Guess],
    policy: DiversityPolicy,
    round: usize,
    seed: u64,
) -> Vec<Word> {
    let active = match policy {
        DiversityPolicy::Off => false,
        DiversityPolicy::Alternate => round % 2 == 0,
        DiversityPolicy::Coin => ChaCha8Rng::seed_from_u64(seed).gen_bool(0.5),
    };
    let all = || remaining.iter().cloned().collect::<Vec<_>>();
    if !active {
        return all();
    }
    let held: BTreeSet<&Word> = final_list
        .entries()
        .iter()
        .map(|e| &e.guess)
        .chain(pending)
        .flat_map(|g| g.words().iter())
        .collect();
    let kept: Vec<Word> = remaining.iter().filter(|w| !held.contains(w)).cloned().collect();
    if kept.len() < DIVERSITY_FLOOR {
        all()
    } else {
        kept
    }
}
