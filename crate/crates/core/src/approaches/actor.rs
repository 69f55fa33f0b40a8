use std::collections::BTreeSet;

use super::session::{guess_lines, word_set, Abort, Session, Step};
use crate::guess::{
    actor2_decide, actor_o1_decide, diversity_remove, parse_decision, parse_guess, FinalGuessList, MoleSet,
    ParsedDecision, ParsedGuess, SubmissionDecision,
};
use crate::prompts::{ids, PromptCatalog, PromptContext};
use crate::puzzle::{Guess, Word};
use crate::transcript::Event;

/// Brainstorm calls per cycle in the five-stage pipeline.
const BRAINSTORM_CALLS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActorVariant {
    /// Evaluate winner is submitted directly.
    Actor,
    /// Evaluate winners go to the final list; release needs a disjoint pair
    /// or a thrice-repeated guess. Adds moles and diversity removal.
    Actor2,
    /// One brainstorm call per candidate; release via quadruplet, triplet,
    /// pair and thrice rules.
    ActorO1,
}

impl ActorVariant {
    fn evaluate_template(self) -> &'static str {
        match self {
            ActorVariant::Actor => ids::ACTOR_EVALUATE,
            ActorVariant::Actor2 => ids::ACTOR2_EVALUATE,
            ActorVariant::ActorO1 => ids::ACTOR_O1_EVALUATE,
        }
    }

    fn gated(self) -> bool {
        self != ActorVariant::Actor
    }
}

struct Cycle {
    presented: Vec<Word>,
    presented_set: BTreeSet<Word>,
    moles: MoleSet,
    bad: Vec<Guess>,
}

pub(crate) fn run(s: &mut Session<'_>, variant: ActorVariant) -> Step {
    let mut stockpile: Vec<Guess> = Vec::new();
    let mut final_list = FinalGuessList::new();
    let mut cursor = 0;
    let mut stalls = 0;
    let mut cycle_no = 0;
    while !s.state.is_over() {
        cycle_no += 1;
        let mole_seed = s.next_seed();
        let diversity_seed = s.next_seed();
        let (presented, moles) = s.present(variant.gated(), mole_seed);
        let c = Cycle {
            presented_set: word_set(&presented),
            presented,
            moles,
            bad: s.state.incorrect().to_vec(),
        };
        let brainstorm_words = if variant.gated() {
            let keep: BTreeSet<Word> = diversity_remove(
                &c.presented_set,
                &final_list,
                &stockpile,
                s.cfg.diversity,
                cycle_no,
                diversity_seed,
            )
            .into_iter()
            .collect();
            c.presented.iter().filter(|w| keep.contains(*w)).cloned().collect()
        } else {
            c.presented.clone()
        };

        let candidate = match variant {
            ActorVariant::ActorO1 => brainstorm_o1(s, &c, &brainstorm_words, cycle_no)?,
            _ => brainstorm_staged(s, &c, &brainstorm_words, &mut cursor, cycle_no)?,
        };
        let mut progressed = false;
        if let Some(g) = candidate {
            if s.screen(&g, &c.moles) {
                stockpile.push(g.clone());
                s.event(Event::Stockpiled { guess: g, size: stockpile.len() });
                progressed = true;
            }
        }

        let threshold =
            if s.state.correct().len() >= 2 { s.cfg.reduced_threshold } else { s.cfg.stockpile_threshold };
        if stockpile.len() >= threshold {
            s.event(Event::EvaluateTriggered { pending: stockpile.len(), threshold });
            s.enter("evaluate", cycle_no);
            let notes = guess_lines(&stockpile);
            let reply = s.ask(variant.evaluate_template(), &PromptContext::new().words(&c.presented).notes(&notes))?;
            let formatted = s.ask(ids::FORMAT_GUESS, &PromptContext::new().words(&c.presented).notes(&reply))?;
            let parsed = parse_guess(&formatted, &c.presented_set);
            s.event(Event::GuessParsed { stage: variant.evaluate_template().into(), parsed: parsed.clone() });
            stockpile.clear();
            if let ParsedGuess::Guess(g) = parsed {
                if !variant.gated() {
                    progressed |= s.submit(&g).is_some();
                } else if s.screen(&g, &c.moles) {
                    let count = final_list.append(g.clone());
                    let processed = final_list.processed_count();
                    s.event(Event::FinalListUpdated { guess: g, count, processed });
                    progressed = true;
                }
            }
        }

        if variant.gated() {
            progressed |= release(s, &mut final_list, variant);
        }
        stockpile.retain(|g| s.state.validity(g).is_ok());
        final_list.retain(|g| s.state.validity(g).is_ok());

        if progressed {
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= s.cfg.restart_cap && !s.state.is_over() {
                return Err(Abort::RestartCap(format!("{stalls} cycles in a row without a candidate guess")));
            }
        }
    }
    Ok(())
}

/// Five brainstorm calls, then extract, discern and decide.
fn brainstorm_staged(
    s: &mut Session<'_>,
    c: &Cycle,
    brainstorm_words: &[Word],
    cursor: &mut usize,
    cycle_no: usize,
) -> Result<Option<Guess>, Abort> {
    s.enter("brainstorm", cycle_no);
    let mut notes = Vec::with_capacity(BRAINSTORM_CALLS);
    for _ in 0..BRAINSTORM_CALLS {
        let catalog: &PromptCatalog = s.catalog();
        let (template, next) = catalog.next_brainstorm_template(*cursor);
        *cursor = next;
        let ctx = PromptContext::new().words(brainstorm_words).bad_guesses(&c.bad).template(template);
        notes.push(s.ask(ids::ACTOR_BRAINSTORM, &ctx)?);
    }
    let mut text = notes.join("\n\n");
    for (stage, template) in [("extract", ids::ACTOR_EXTRACT), ("discern", ids::ACTOR_DISCERN), ("decide", ids::ACTOR_DECIDE)] {
        s.enter(stage, cycle_no);
        text = s.ask(template, &PromptContext::new().words(&c.presented).bad_guesses(&c.bad).notes(&text))?;
    }
    let formatted = s.ask(ids::FORMAT_DECISION, &PromptContext::new().words(&c.presented).notes(&text))?;
    let decision = parse_decision(&formatted, &c.presented_set);
    s.event(Event::DecisionParsed { decision: decision.clone() });
    Ok(match decision {
        ParsedDecision::Submit(g) => Some(g),
        _ => None,
    })
}

/// One combined brainstorm-and-select call plus formatting.
fn brainstorm_o1(s: &mut Session<'_>, c: &Cycle, brainstorm_words: &[Word], cycle_no: usize) -> Result<Option<Guess>, Abort> {
    s.enter("brainstorm", cycle_no);
    let reply = s.ask(ids::ACTOR_O1_BRAINSTORM, &PromptContext::new().words(brainstorm_words).bad_guesses(&c.bad))?;
    let formatted = s.ask(ids::FORMAT_GUESS, &PromptContext::new().words(&c.presented).notes(&reply))?;
    let parsed = parse_guess(&formatted, &c.presented_set);
    s.event(Event::GuessParsed { stage: ids::ACTOR_O1_BRAINSTORM.into(), parsed: parsed.clone() });
    Ok(match parsed {
        ParsedGuess::Guess(g) => Some(g),
        _ => None,
    })
}

/// Submits whatever the release rules allow, until they say wait.
fn release(s: &mut Session<'_>, list: &mut FinalGuessList, variant: ActorVariant) -> bool {
    let mut released = false;
    while !s.state.is_over() {
        let decision = match variant {
            ActorVariant::ActorO1 => actor_o1_decide(list, s.cfg.o1_thresholds),
            _ => actor2_decide(list),
        };
        let SubmissionDecision::Submit { rule, guesses } = decision else { break };
        s.event(Event::GateReleased { rule, guesses: guesses.clone() });
        for g in &guesses {
            if s.state.is_over() {
                break;
            }
            s.submit(g);
            list.remove(g);
        }
        list.retain(|g| s.state.validity(g).is_ok());
        released = true;
    }
    released
}
