use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use super::{CompletionProvider, CompletionRequest, CompletionResponse, ProviderError};
use crate::guess::{parse_guess_line, ABSTAIN_SENTENCE};
use crate::prompts::{ids, words_line};
use crate::puzzle::{GroupColor, Guess, Puzzle, Word};

/// Answers every stage with a correct group of the puzzle it was built for.
///
/// Candidates are solution groups written as comma-separated lines in the
/// prompt and lying wholly within its word list; when the prompt lists none,
/// every solution group within the word list qualifies. Among candidates the
/// oracle names the one it has named least so far in the same stage.
pub struct OracleProvider {
    puzzle: Puzzle,
    state: Mutex<OracleState>,
}

struct OracleState {
    named: BTreeMap<String, [usize; 4]>,
    herring: Option<Guess>,
}

impl OracleProvider {
    pub fn new(puzzle: Puzzle) -> Self {
        OracleProvider { puzzle, state: Mutex::new(OracleState { named: BTreeMap::new(), herring: None }) }
    }

    /// The first guess-formatting answer will be `herring` instead.
    pub fn with_herring(puzzle: Puzzle, herring: Guess) -> Self {
        OracleProvider { puzzle, state: Mutex::new(OracleState { named: BTreeMap::new(), herring: Some(herring) }) }
    }

    fn candidates(&self, prompt: &str, words: &BTreeSet<Word>) -> Vec<GroupColor> {
        let mut found: Vec<GroupColor> = Vec::new();
        for line in prompt.lines() {
            let Ok(g) = parse_guess_line(line, words) else { continue };
            if let Some(sg) = self.puzzle.groups.iter().find(|sg| sg.words == g) {
                if !found.contains(&sg.color) {
                    found.push(sg.color);
                }
            }
        }
        if found.is_empty() {
            found = self
                .puzzle
                .groups
                .iter()
                .filter(|sg| sg.words.words().iter().all(|w| words.contains(w)))
                .map(|sg| sg.color)
                .collect();
        }
        found
    }

    fn solution_text(&self, colors: &[GroupColor]) -> String {
        colors
            .iter()
            .enumerate()
            .map(|(i, c)| format!("GROUP {}: {}", i + 1, self.puzzle.group(*c).words))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl CompletionProvider for OracleProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        let listed = words_line(&request.prompt)
            .ok_or_else(|| ProviderError::permanent(format!("prompt for {} has no word list", request.stage)))?;
        let words: BTreeSet<Word> = listed.iter().filter_map(|w| Word::new(w).ok()).collect();
        let mut state = self.state.lock().expect("oracle lock");
        let stage = request.stage.as_str();

        if stage == ids::FORMAT_GUESS {
            if let Some(h) = state.herring.take_if(|h| h.words().iter().all(|w| words.contains(w))) {
                return Ok(CompletionResponse::text(h.to_string()));
            }
        }

        let candidates = self.candidates(&request.prompt, &words);
        if stage == ids::ONESHOT || stage == ids::FORMAT_SOLUTION {
            let colors = if candidates.len() == 4 { candidates } else { GroupColor::ALL.to_vec() };
            return Ok(CompletionResponse::text(self.solution_text(&colors)));
        }
        let named = state.named.entry(request.stage.clone()).or_default();
        let Some(&pick) = candidates.iter().min_by_key(|c| named[c.index()]) else {
            return Ok(CompletionResponse::text(ABSTAIN_SENTENCE));
        };
        named[pick.index()] += 1;
        let line = self.puzzle.group(pick).words.to_string();
        let text = if stage == ids::FORMAT_GUESS {
            line
        } else if stage == ids::FORMAT_DECISION {
            format!("{line}\nSUBMIT")
        } else {
            format!("These four share a connection ({}).\n{line}", self.puzzle.group(pick).category)
        };
        Ok(CompletionResponse::text(text))
    }
}
