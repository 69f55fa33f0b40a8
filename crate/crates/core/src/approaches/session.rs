use std::collections::BTreeSet;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{game_id, ApproachConfig};
use crate::guess::{inject_moles, mole_reject, MoleSet};
use crate::prompts::{PromptCatalog, PromptContext};
use crate::provider::{prompt_hash, CompletionProvider, CompletionRequest, ProviderError};
use crate::puzzle::{GameScore, GameState, Guess, Puzzle, SubmissionResult, Word};
use crate::transcript::{AbortInfo, AbortKind, Event, Outcome, RejectReason, Transcript};

#[derive(Debug)]
pub(crate) enum Abort {
    RestartCap(String),
    MaxCalls(u64),
    Provider(ProviderError),
    Prompt(String),
}

impl Abort {
    fn info(self) -> AbortInfo {
        let (kind, reason) = match self {
            Abort::RestartCap(r) => (AbortKind::RestartCap, r),
            Abort::MaxCalls(n) => (AbortKind::MaxCalls, format!("reached the limit of {n} provider calls")),
            Abort::Provider(e) => (AbortKind::ProviderError, e.to_string()),
            Abort::Prompt(r) => (AbortKind::PromptError, r),
        };
        AbortInfo { kind, reason }
    }
}

pub(crate) type Step = Result<(), Abort>;

pub(crate) struct Session<'a> {
    provider: &'a dyn CompletionProvider,
    catalog: &'a PromptCatalog,
    pub cfg: &'a ApproachConfig,
    pub state: GameState,
    pub log: Transcript,
    pub rng: ChaCha8Rng,
    next_call: u64,
    score_override: Option<GameScore>,
}

impl<'a> Session<'a> {
    pub fn new(
        puzzle: &Puzzle,
        provider: &'a dyn CompletionProvider,
        cfg: &'a ApproachConfig,
        catalog: &'a PromptCatalog,
    ) -> Self {
        Session {
            provider,
            catalog,
            cfg,
            state: GameState::new(puzzle.clone()),
            log: Transcript::new(game_id(cfg.approach, puzzle.id), puzzle, cfg.clone()),
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            next_call: 0,
            score_override: None,
        }
    }

    pub fn catalog(&self) -> &'a PromptCatalog {
        self.catalog
    }

    pub fn event(&mut self, e: Event) {
        self.log.push(e);
    }

    pub fn enter(&mut self, stage: &str, cycle: usize) {
        self.event(Event::StageEntered { stage: stage.into(), cycle });
    }

    pub fn remaining_words(&self) -> Vec<Word> {
        self.state.remaining().iter().cloned().collect()
    }

    /// Renders `template`, calls the provider and logs both sides.
    pub fn ask(&mut self, template: &str, ctx: &PromptContext<'_>) -> Result<String, Abort> {
        if self.next_call >= self.cfg.max_calls {
            return Err(Abort::MaxCalls(self.cfg.max_calls));
        }
        let prompt = self.catalog.render(template, ctx).map_err(|e| Abort::Prompt(e.to_string()))?;
        let call_index = self.next_call;
        self.next_call += 1;
        self.event(Event::PromptIssued {
            call_index,
            stage: template.into(),
            prompt_hash: prompt_hash(&prompt),
            text: prompt.clone(),
        });
        let request = CompletionRequest {
            model_id: self.cfg.model().into(),
            prompt,
            sampling: self.cfg.sampling,
            call_index,
            stage: template.into(),
        };
        match self.provider.complete(&request) {
            Ok(r) => {
                self.event(Event::CompletionReceived { call_index, text: r.text.clone(), usage: r.usage });
                Ok(r.text)
            }
            Err(error) => {
                self.event(Event::CompletionFailed { call_index, error: error.clone() });
                Err(Abort::Provider(error))
            }
        }
    }

    pub fn reject(&mut self, guess: &Guess, reason: RejectReason) {
        self.event(Event::GuessRejected { guess: guess.clone(), reason });
    }

    /// Mole and validity screening before a guess is kept for later.
    pub fn screen(&mut self, guess: &Guess, moles: &MoleSet) -> bool {
        if mole_reject(guess, moles) {
            self.reject(guess, RejectReason::Mole);
            return false;
        }
        if let Err(r) = self.state.validity(guess) {
            self.reject(guess, RejectReason::Invalid(r));
            return false;
        }
        true
    }

    /// Submits a guess, auto-completing the last group when possible.
    /// Invalid guesses are logged as rejected and return `None`.
    pub fn submit(&mut self, guess: &Guess) -> Option<SubmissionResult> {
        if self.state.is_over() {
            return None;
        }
        if let Err(r) = self.state.validity(guess) {
            self.reject(guess, RejectReason::Invalid(r));
            return None;
        }
        self.event(Event::GuessSubmitted { guess: guess.clone(), auto: false });
        let result = self.state.submit_guess(guess).expect("game in progress");
        let outcome = match &result {
            SubmissionResult::Correct(c) => Outcome::Correct(*c),
            SubmissionResult::Incorrect => Outcome::Incorrect,
            SubmissionResult::Invalid(_) => unreachable!("validity checked above"),
        };
        self.event(Event::OutcomeRecorded { outcome });
        if let Some((last, color)) = self.state.auto_complete() {
            self.event(Event::GuessSubmitted { guess: last, auto: true });
            self.event(Event::OutcomeRecorded { outcome: Outcome::Correct(color) });
        }
        Some(result)
    }

    /// Word list shown to the model this cycle, with moles mixed in once
    /// two guesses have failed and a group is solved.
    pub fn present(&mut self, allow_moles: bool, seed: u64) -> (Vec<Word>, MoleSet) {
        let solved = self.state.solved_groups();
        let active = allow_moles && self.cfg.mole_count > 0 && self.state.incorrect().len() >= 2 && !solved.is_empty();
        if !active {
            return (self.remaining_words(), MoleSet::empty(seed));
        }
        let count = self.cfg.mole_count.min(solved.len() * crate::puzzle::GROUP_SIZE);
        let (words, moles) = inject_moles(self.state.remaining(), &solved, count, seed).expect("mole count clamped");
        self.event(Event::MoleInjected { moles: moles.moles.iter().cloned().collect(), rng_seed: seed });
        (words, moles)
    }

    pub fn next_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn set_score(&mut self, score: GameScore) {
        self.score_override = Some(score);
    }

    pub fn finish(mut self, result: Step) -> Transcript {
        let score = self.score_override.unwrap_or_else(|| self.state.score());
        let aborted = result.err().map(Abort::info);
        self.event(Event::GameEnded { score, aborted });
        self.log
    }
}

pub(crate) fn word_set(words: &[Word]) -> BTreeSet<Word> {
    words.iter().cloned().collect()
}

pub(crate) fn guess_lines(guesses: &[Guess]) -> String {
    guesses.iter().map(Guess::to_string).collect::<Vec<_>>().join("\n")
}
