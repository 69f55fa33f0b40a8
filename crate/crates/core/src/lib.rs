//! Engine, datasets, prompts and solver pipelines for the Connections word
//! grouping puzzle.

pub mod approaches;
pub mod dataset;
pub mod fixtures;
pub mod guess;
pub mod prompts;
pub mod provider;
pub mod puzzle;
pub mod transcript;

pub use approaches::{run_game, ApproachConfig, ApproachId};
pub use dataset::{dataset_summary, difficulty_bucket, load_archive, BucketCounts, DifficultyBucket};
pub use provider::{CompletionProvider, CompletionRequest, CompletionResponse, ProviderError};
pub use puzzle::{
    check_guess, game_score, GameScore, GameState, GameStatus, GroupColor, Guess, GuessOutcome, Puzzle,
    SolutionGroup, SubmissionResult, Word,
};
pub use transcript::{Event, Transcript};
