//! Per-game event logs, stored as JSON Lines: a header line followed by one
//! event per line.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approaches::ApproachConfig;
use crate::dataset::PuzzleRecord;
use crate::guess::{GateRule, MalformedReason, ParsedDecision, ParsedGuess};
use crate::provider::{prompt_hash, CallRecord, ProviderError, ReplayProvider, Usage};
use crate::puzzle::{validate_puzzle, GameScore, GroupColor, Guess, InvalidReason, Puzzle, PuzzleError, Word};

pub const TRANSCRIPT_SCHEMA: &str = "connections-transcript";
pub const TRANSCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub schema: String,
    pub version: u32,
    pub game_id: String,
    pub puzzle: PuzzleRecord,
    pub config: ApproachConfig,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "color", rename_all = "snake_case")]
pub enum Outcome {
    Correct(GroupColor),
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RejectReason {
    Invalid(InvalidReason),
    Mole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortKind {
    RestartCap,
    MaxCalls,
    ProviderError,
    PromptError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortInfo {
    pub kind: AbortKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroup {
    pub guess: Guess,
    pub color: Option<GroupColor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    StageEntered { stage: String, cycle: usize },
    PromptIssued { call_index: u64, stage: String, prompt_hash: String, text: String },
    CompletionReceived { call_index: u64, text: String, usage: Option<Usage> },
    CompletionFailed { call_index: u64, error: ProviderError },
    GuessParsed { stage: String, parsed: ParsedGuess },
    DecisionParsed { decision: ParsedDecision },
    SolutionParsed { groups: Option<Vec<Guess>>, error: Option<MalformedReason> },
    MoleInjected { moles: Vec<Word>, rng_seed: u64 },
    Stockpiled { guess: Guess, size: usize },
    EvaluateTriggered { pending: usize, threshold: usize },
    FinalListUpdated { guess: Guess, count: usize, processed: usize },
    GateReleased { rule: GateRule, guesses: Vec<Guess> },
    GuessRejected { guess: Guess, reason: RejectReason },
    GuessSubmitted { guess: Guess, auto: bool },
    OutcomeRecorded { outcome: Outcome },
    SolutionGraded { groups: Vec<GradedGroup> },
    GameEnded { score: GameScore, aborted: Option<AbortInfo> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub events: Vec<Event>,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("transcript is empty")]
    Empty,
    #[error("unsupported transcript schema {schema:?} version {version}")]
    Schema { schema: String, version: u32 },
    #[error("invalid transcript: {0}")]
    Invariant(String),
    #[error("embedded puzzle is invalid: {0}")]
    Puzzle(#[from] PuzzleError),
}

impl Transcript {
    pub fn new(game_id: String, puzzle: &Puzzle, config: ApproachConfig) -> Self {
        let rng_seed = config.rng_seed;
        Transcript {
            header: TranscriptHeader {
                schema: TRANSCRIPT_SCHEMA.into(),
                version: TRANSCRIPT_VERSION,
                game_id,
                puzzle: puzzle.to_record(),
                config,
                rng_seed,
            },
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn puzzle_id(&self) -> u32 {
        self.header.puzzle.id
    }

    pub fn puzzle(&self) -> Result<Puzzle, TranscriptError> {
        Ok(validate_puzzle(&self.header.puzzle)?)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TranscriptError::Empty)?;
        let header: TranscriptHeader =
            serde_json::from_str(first).map_err(|e| TranscriptError::Parse { line: 1, message: e.to_string() })?;
        if header.schema != TRANSCRIPT_SCHEMA || header.version != TRANSCRIPT_VERSION {
            return Err(TranscriptError::Schema { schema: header.schema, version: header.version });
        }
        let events = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| TranscriptError::Parse { line: i + 1, message: e.to_string() }))
            .collect::<Result<_, _>>()?;
        Ok(Transcript { header, events })
    }

    /// The final score, if the game ended.
    pub fn score(&self) -> Option<GameScore> {
        self.end().map(|(s, _)| s)
    }

    pub fn aborted(&self) -> Option<&AbortInfo> {
        self.end().and_then(|(_, a)| a)
    }

    fn end(&self) -> Option<(GameScore, Option<&AbortInfo>)> {
        self.events.iter().rev().find_map(|e| match e {
            Event::GameEnded { score, aborted } => Some((*score, aborted.as_ref())),
            _ => None,
        })
    }

    /// Colors of the groups credited as correct, in order.
    pub fn correct_colors(&self) -> Vec<GroupColor> {
        let mut out = Vec::new();
        for e in &self.events {
            match e {
                Event::OutcomeRecorded { outcome: Outcome::Correct(c) } => out.push(*c),
                Event::SolutionGraded { groups } => out.extend(groups.iter().filter_map(|g| g.color)),
                _ => {}
            }
        }
        out
    }

    pub fn submissions(&self) -> Vec<(&Guess, bool)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::GuessSubmitted { guess, auto } => Some((guess, *auto)),
                _ => None,
            })
            .collect()
    }

    pub fn prompts(&self) -> Vec<(&str, &str)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::PromptIssued { stage, text, .. } => Some((stage.as_str(), text.as_str())),
                _ => None,
            })
            .collect()
    }

    pub fn call_count(&self) -> usize {
        self.prompts().len()
    }

    /// Completed calls as (prompt, completion) records.
    pub fn calls(&self) -> Vec<CallRecord> {
        let mut out = Vec::new();
        let mut pending: Option<(u64, &str, &str, &str)> = None;
        for e in &self.events {
            match e {
                Event::PromptIssued { call_index, stage, prompt_hash, text } => {
                    pending = Some((*call_index, stage, prompt_hash, text));
                }
                Event::CompletionReceived { call_index, text, usage } => {
                    if let Some((i, stage, hash, prompt)) = pending.take().filter(|p| p.0 == *call_index) {
                        out.push(CallRecord {
                            call_index: i,
                            stage: stage.into(),
                            prompt_hash: hash.into(),
                            prompt: prompt.into(),
                            completion: text.clone(),
                            usage: *usage,
                        });
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// A provider that answers this game's calls exactly as recorded.
    pub fn replay_provider(&self) -> ReplayProvider {
        let mut p = ReplayProvider::from_records(self.calls());
        let mut hashes = std::collections::BTreeMap::new();
        for e in &self.events {
            match e {
                Event::PromptIssued { call_index, prompt_hash, .. } => {
                    hashes.insert(*call_index, prompt_hash.clone());
                }
                Event::CompletionFailed { call_index, error } => {
                    let hash = hashes.get(call_index).cloned().unwrap_or_default();
                    p.insert_failure(*call_index, hash, error.clone());
                }
                _ => {}
            }
        }
        p
    }

    /// Checks the structural invariants of a finished game log.
    pub fn validate(&self) -> Result<(), TranscriptError> {
        let bad = |m: String| Err(TranscriptError::Invariant(m));
        let ended = self.events.iter().filter(|e| matches!(e, Event::GameEnded { .. })).count();
        if ended != 1 {
            return bad(format!("expected one game_ended event, found {ended}"));
        }
        if !matches!(self.events.last(), Some(Event::GameEnded { .. })) {
            return bad("game_ended is not the last event".into());
        }
        let mut last_call: Option<u64> = None;
        let mut open_call: Option<u64> = None;
        for (i, e) in self.events.iter().enumerate() {
            let next = self.events.get(i + 1);
            match e {
                Event::PromptIssued { call_index, prompt_hash: h, text, .. } => {
                    if last_call.is_some_and(|l| *call_index <= l) {
                        return bad(format!("call index {call_index} is not increasing"));
                    }
                    if *h != prompt_hash(text) {
                        return bad(format!("prompt hash mismatch at call {call_index}"));
                    }
                    if text.is_empty() {
                        return bad(format!("empty prompt at call {call_index}"));
                    }
                    last_call = Some(*call_index);
                    open_call = Some(*call_index);
                }
                Event::CompletionReceived { call_index, .. } | Event::CompletionFailed { call_index, .. } => {
                    if open_call.take() != Some(*call_index) {
                        return bad(format!("completion {call_index} without a matching prompt"));
                    }
                }
                Event::GuessSubmitted { .. } => {
                    if !matches!(next, Some(Event::OutcomeRecorded { .. })) {
                        return bad(format!("submission at event {i} is not followed by its outcome"));
                    }
                }
                Event::OutcomeRecorded { .. } => {
                    if !matches!(self.events.get(i.wrapping_sub(1)), Some(Event::GuessSubmitted { .. })) {
                        return bad(format!("outcome at event {i} has no submission"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for AbortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbortKind::RestartCap => "restart cap reached",
            AbortKind::MaxCalls => "call limit reached",
            AbortKind::ProviderError => "provider error",
            AbortKind::PromptError => "prompt error",
        })
    }
}
