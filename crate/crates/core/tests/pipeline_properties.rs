use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use connections_core::approaches::{run_game, ApproachConfig, ApproachId};
use connections_core::fixtures::fixture_puzzles;
use connections_core::prompts::{format_bad_guesses, ids, words_line};
use connections_core::provider::{CompletionRequest, CompletionResponse, FnProvider, ProviderError};
use connections_core::puzzle::{GameState, Guess, Word};
use connections_core::transcript::{Event, Outcome};

fn pick(rng: &mut ChaCha8Rng, words: &[String]) -> String {
    words.choose_multiple(rng, 4).cloned().collect::<Vec<_>>().join(", ")
}

/// Picks random words from the prompt's list; deterministic per (seed, call).
fn random_reply(seed: u64, req: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ req.call_index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let words: Vec<String> = words_line(&req.prompt).unwrap_or_default();
    let text = match req.stage.as_str() {
        s if s == ids::FORMAT_DECISION && rng.gen_bool(0.4) => "CONTINUE".into(),
        s if s == ids::FORMAT_DECISION => format!("{}\nSUBMIT", pick(&mut rng, &words)),
        s if s == ids::FORMAT_SOLUTION => {
            (1..=4).map(|i| format!("GROUP {i}: {}", pick(&mut rng, &words))).collect::<Vec<_>>().join("\n")
        }
        _ => pick(&mut rng, &words),
    };
    Ok(CompletionResponse::text(text))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_providers_never_break_invariants(seed in any::<u64>(), approach in 0usize..8, puzzle in 0usize..3) {
        let approach = ApproachId::ALL[approach];
        let p = fixture_puzzles().swap_remove(puzzle);
        let cfg = ApproachConfig { rng_seed: seed, restart_cap: 6, max_calls: 300, ..ApproachConfig::for_approach(approach) };
        let provider = FnProvider(move |req: &CompletionRequest| random_reply(seed, req));
        let t = run_game(&p, &provider, &cfg).unwrap();
        prop_assert!(t.validate().is_ok());

        let mut state = GameState::new(p.clone());
        let mut incorrect: Vec<Guess> = Vec::new();
        for e in &t.events {
            match e {
                Event::GuessSubmitted { guess, .. } => {
                    prop_assert!(state.validity(guess).is_ok());
                    state.submit_guess(guess).unwrap();
                }
                Event::OutcomeRecorded { outcome: Outcome::Incorrect } => {
                    incorrect = state.incorrect().to_vec();
                }
                Event::PromptIssued { text, .. } if text.contains("Incorrect guesses so far") => {
                    prop_assert!(text.contains(&format_bad_guesses(&incorrect)));
                }
                Event::GateReleased { guesses, .. } => {
                    for (i, a) in guesses.iter().enumerate() {
                        for b in &guesses[i + 1..] {
                            prop_assert!(!a.overlaps(b));
                        }
                    }
                }
                Event::MoleInjected { moles, .. } => {
                    let remaining: &BTreeSet<Word> = state.remaining();
                    prop_assert!(moles.iter().all(|m| !remaining.contains(m) && p.contains(m)));
                }
                _ => {}
            }
        }
        let score = t.score().unwrap();
        if approach != ApproachId::Oneshot {
            prop_assert_eq!(score, state.score());
        }
        prop_assert!(score.incorrect_count <= 4);

        let again = run_game(&p, &FnProvider(move |req: &CompletionRequest| random_reply(seed, req)), &cfg).unwrap();
        prop_assert_eq!(again.to_jsonl(), t.to_jsonl());
    }
}
