use super::session::{Abort, Session, Step};
use crate::guess::{parse_guess, ParsedGuess};
use crate::prompts::{ids, PromptContext};
use crate::transcript::Event;

/// One make-guess call plus one formatting call per attempt.
pub(crate) fn run(s: &mut Session<'_>, template: &str) -> Step {
    let mut failures = 0;
    let mut attempt = 0;
    while !s.state.is_over() {
        attempt += 1;
        s.enter("make_guess", attempt);
        let words = s.remaining_words();
        let bad = s.state.incorrect().to_vec();
        let reply = s.ask(template, &PromptContext::new().words(&words).bad_guesses(&bad))?;
        let formatted = s.ask(ids::FORMAT_GUESS, &PromptContext::new().words(&words).notes(&reply))?;
        let parsed = parse_guess(&formatted, s.state.remaining());
        s.event(Event::GuessParsed { stage: template.into(), parsed: parsed.clone() });
        let submitted = match parsed {
            ParsedGuess::Guess(g) => s.submit(&g).is_some(),
            _ => false,
        };
        if submitted {
            failures = 0;
        } else {
            failures += 1;
            if failures >= s.cfg.restart_cap {
                return Err(Abort::RestartCap(format!("{failures} attempts in a row without a valid guess")));
            }
        }
    }
    Ok(())
}
