//! Hand-built transcripts with chosen outcomes, for metric checks.

use connections_core::approaches::{ApproachConfig, ApproachId};
use connections_core::puzzle::{GameState, GroupColor, Guess, Puzzle, SubmissionResult};
use connections_core::transcript::{AbortInfo, AbortKind, Event, Outcome, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticEnd {
    Finished,
    Aborted(AbortKind),
}

/// Plays `correct` groups in order and `incorrect` wrong guesses drawn from
/// the words left. The wrong guesses go before a third correct group, since
/// that one auto-completes the game.
pub fn synthetic_game(
    puzzle: &Puzzle,
    approach: ApproachId,
    correct: &[GroupColor],
    incorrect: usize,
    end: SyntheticEnd,
) -> Transcript {
    let cfg = ApproachConfig::for_approach(approach);
    let game_id = format!("{}-{}", connections_core::approaches::game_id(approach, puzzle.id), uniq(correct, incorrect, end));
    let mut t = Transcript::new(game_id, puzzle, cfg);
    let mut state = GameState::new(puzzle.clone());
    let submit = |t: &mut Transcript, state: &mut GameState, g: Guess| {
        t.push(Event::GuessSubmitted { guess: g.clone(), auto: false });
        let outcome = match state.submit_guess(&g).expect("game in progress") {
            SubmissionResult::Correct(c) => Outcome::Correct(c),
            SubmissionResult::Incorrect => Outcome::Incorrect,
            SubmissionResult::Invalid(r) => panic!("synthetic guess {g} invalid: {r}"),
        };
        t.push(Event::OutcomeRecorded { outcome });
        if let Some((last, color)) = state.auto_complete() {
            t.push(Event::GuessSubmitted { guess: last, auto: true });
            t.push(Event::OutcomeRecorded { outcome: Outcome::Correct(color) });
        }
    };
    let split = correct.len().min(2);
    for c in &correct[..split] {
        submit(&mut t, &mut state, puzzle.group(*c).words.clone());
    }
    for g in wrong_guesses(&state, incorrect) {
        submit(&mut t, &mut state, g);
    }
    for c in &correct[split..] {
        submit(&mut t, &mut state, puzzle.group(*c).words.clone());
    }
    let aborted = match end {
        SyntheticEnd::Finished => None,
        SyntheticEnd::Aborted(kind) => Some(AbortInfo { kind, reason: "synthetic".into() }),
    };
    t.push(Event::GameEnded { score: state.score(), aborted });
    t
}

fn uniq(correct: &[GroupColor], incorrect: usize, end: SyntheticEnd) -> String {
    let colors: String = correct.iter().map(|c| &c.name()[..1]).collect();
    let end = match end {
        SyntheticEnd::Finished => "f".to_string(),
        SyntheticEnd::Aborted(k) => format!("{k:?}").to_lowercase(),
    };
    format!("{colors}{incorrect}{end}")
}

/// The first `n` incorrect 4-subsets of the remaining words, in
/// lexicographic order.
fn wrong_guesses(state: &GameState, n: usize) -> Vec<Guess> {
    let words: Vec<_> = state.remaining().iter().cloned().collect();
    let mut out = Vec::new();
    let k = words.len();
    'outer: for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    if out.len() == n {
                        break 'outer;
                    }
                    let g = Guess::new([&words[a], &words[b], &words[c], &words[d]].into_iter().cloned()).unwrap();
                    if !state.puzzle().groups.iter().any(|sg| sg.words == g) {
                        out.push(g);
                    }
                }
            }
        }
    }
    assert_eq!(out.len(), n, "not enough words left for {n} wrong guesses");
    out
}
