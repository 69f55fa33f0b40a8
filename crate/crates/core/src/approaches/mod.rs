//! The eight solver pipelines. Each one drives a [`GameState`] through
//! prompts, parsing and guess logic over a completion provider, logging
//! every step to a [`Transcript`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::guess::{DiversityPolicy, O1Thresholds};
use crate::prompts::{ids, PromptCatalog};
use crate::provider::{CompletionProvider, Sampling};
use crate::puzzle::Puzzle;
use crate::transcript::Transcript;

mod actor;
mod guess_loop;
mod oneshot;
mod session;

pub use actor::ActorVariant;
pub use oneshot::{grade_solution, parse_solution, OneshotSolution};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ApproachId {
    #[default]
    #[serde(rename = "vanilla")]
    Vanilla,
    #[serde(rename = "cot")]
    CoT,
    #[serde(rename = "cot-scripted")]
    CoTScripted,
    #[serde(rename = "actor")]
    Actor,
    #[serde(rename = "actor-2")]
    Actor2,
    #[serde(rename = "oneshot")]
    Oneshot,
    #[serde(rename = "vanilla-o1")]
    VanillaO1,
    #[serde(rename = "actor-o1")]
    ActorO1,
}

impl ApproachId {
    pub const ALL: [ApproachId; 8] = [
        ApproachId::Vanilla,
        ApproachId::CoT,
        ApproachId::CoTScripted,
        ApproachId::Actor,
        ApproachId::Actor2,
        ApproachId::Oneshot,
        ApproachId::VanillaO1,
        ApproachId::ActorO1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ApproachId::Vanilla => "vanilla",
            ApproachId::CoT => "cot",
            ApproachId::CoTScripted => "cot-scripted",
            ApproachId::Actor => "actor",
            ApproachId::Actor2 => "actor-2",
            ApproachId::Oneshot => "oneshot",
            ApproachId::VanillaO1 => "vanilla-o1",
            ApproachId::ActorO1 => "actor-o1",
        }
    }

    /// Model the approach is meant for when the config names none.
    pub fn default_model(self) -> &'static str {
        match self {
            ApproachId::Oneshot | ApproachId::VanillaO1 | ApproachId::ActorO1 => "o1-preview",
            _ => "gpt-4o",
        }
    }

    /// Make-guess template for the single-guess loop approaches.
    fn make_guess_template(self) -> Option<&'static str> {
        match self {
            ApproachId::Vanilla => Some(ids::VANILLA_MAKE_GUESS),
            ApproachId::CoT => Some(ids::COT_MAKE_GUESS),
            ApproachId::CoTScripted => Some(ids::COT_SCRIPTED_MAKE_GUESS),
            ApproachId::VanillaO1 => Some(ids::VANILLA_O1_MAKE_GUESS),
            _ => None,
        }
    }
}

impl fmt::Display for ApproachId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown approach {0:?}")]
pub struct UnknownApproach(pub String);

impl FromStr for ApproachId {
    type Err = UnknownApproach;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        ApproachId::ALL
            .into_iter()
            .find(|a| a.name() == norm || a.name().replace('-', "") == norm)
            .ok_or_else(|| UnknownApproach(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApproachConfig {
    pub approach: ApproachId,
    /// Empty means the approach's default model.
    pub model_id: String,
    pub stockpile_threshold: usize,
    /// Stockpile size that triggers evaluation once two groups are solved.
    pub reduced_threshold: usize,
    /// Consecutive fruitless attempts (or cycles) before a game is abandoned.
    pub restart_cap: usize,
    pub mole_count: usize,
    pub o1_thresholds: O1Thresholds,
    pub diversity: DiversityPolicy,
    /// Hard ceiling on provider calls per game.
    pub max_calls: u64,
    pub sampling: Sampling,
    pub rng_seed: u64,
}

impl Default for ApproachConfig {
    fn default() -> Self {
        ApproachConfig { model_id: String::new(), ..ApproachConfig::for_approach(ApproachId::Vanilla) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid approach config: {0}")]
pub struct ConfigError(pub String);

impl ApproachConfig {
    pub fn for_approach(approach: ApproachId) -> Self {
        ApproachConfig {
            approach,
            model_id: approach.default_model().into(),
            stockpile_threshold: 5,
            reduced_threshold: 3,
            restart_cap: 20,
            mole_count: 2,
            o1_thresholds: O1Thresholds::default(),
            diversity: DiversityPolicy::Alternate,
            max_calls: 3000,
            sampling: Sampling::default(),
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("stockpile_threshold", self.stockpile_threshold as u64),
            ("reduced_threshold", self.reduced_threshold as u64),
            ("restart_cap", self.restart_cap as u64),
            ("max_calls", self.max_calls),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError(format!("{name} must be at least 1")));
        }
        Ok(())
    }

    pub fn model(&self) -> &str {
        match self.model_id.trim() {
            "" => self.approach.default_model(),
            m => m,
        }
    }
}

pub fn game_id(approach: ApproachId, puzzle_id: u32) -> String {
    format!("{approach}-{puzzle_id}")
}

/// Plays one game with the built-in prompt catalog.
pub fn run_game(
    puzzle: &Puzzle,
    provider: &dyn CompletionProvider,
    cfg: &ApproachConfig,
) -> Result<Transcript, ConfigError> {
    run_game_with_catalog(puzzle, provider, cfg, PromptCatalog::builtin())
}

pub fn run_game_with_catalog(
    puzzle: &Puzzle,
    provider: &dyn CompletionProvider,
    cfg: &ApproachConfig,
    catalog: &PromptCatalog,
) -> Result<Transcript, ConfigError> {
    cfg.validate()?;
    let mut s = session::Session::new(puzzle, provider, cfg, catalog);
    let result = match cfg.approach {
        ApproachId::Oneshot => oneshot::run(&mut s),
        ApproachId::Actor => actor::run(&mut s, ActorVariant::Actor),
        ApproachId::Actor2 => actor::run(&mut s, ActorVariant::Actor2),
        ApproachId::ActorO1 => actor::run(&mut s, ActorVariant::ActorO1),
        other => guess_loop::run(&mut s, other.make_guess_template().expect("single-guess approach")),
    };
    Ok(s.finish(result))
}
