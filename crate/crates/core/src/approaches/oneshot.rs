use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::session::{Abort, Session, Step};
use crate::guess::{parse_guess_line, MalformedReason};
use crate::prompts::{ids, PromptContext};
use crate::puzzle::{check_guess, GameScore, GroupColor, Guess, GuessOutcome, Puzzle, Word, GROUP_COUNT};
use crate::transcript::{Event, GradedGroup};

/// Four proposed groups from a single completion. Groups need not form a
/// partition, so a solver can get three right and one wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneshotSolution {
    pub groups: [Guess; GROUP_COUNT],
}

/// Reads the last four non-empty lines as `label: A, B, C, D` groups.
pub fn parse_solution(text: &str, words: &BTreeSet<Word>) -> Result<OneshotSolution, MalformedReason> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    if lines.is_empty() {
        return Err(MalformedReason::NoContent);
    }
    if lines.len() < GROUP_COUNT {
        return Err(MalformedReason::WrongCount(lines.len()));
    }
    let groups: Vec<Guess> = lines[lines.len() - GROUP_COUNT..]
        .iter()
        .map(|l| parse_guess_line(l, words))
        .collect::<Result<_, _>>()?;
    Ok(OneshotSolution { groups: groups.try_into().expect("four lines") })
}

/// Grades each group; the same solution group listed twice is credited once.
pub fn grade_solution(puzzle: &Puzzle, solution: &OneshotSolution) -> (Vec<GradedGroup>, GameScore) {
    let mut seen: Vec<GroupColor> = Vec::new();
    let graded: Vec<GradedGroup> = solution
        .groups
        .iter()
        .map(|g| {
            let color = match check_guess(puzzle, g) {
                Ok(GuessOutcome::Correct(c)) if !seen.contains(&c) => {
                    seen.push(c);
                    Some(c)
                }
                _ => None,
            };
            GradedGroup { guess: g.clone(), color }
        })
        .collect();
    let correct = seen.len();
    let score = GameScore {
        solved: correct >= GROUP_COUNT - 1,
        perfect: correct == GROUP_COUNT,
        correct_count: correct,
        incorrect_count: GROUP_COUNT - correct,
    };
    (graded, score)
}

pub(crate) fn run(s: &mut Session<'_>) -> Step {
    let words = s.remaining_words();
    let set = s.state.remaining().clone();
    for attempt in 1..=s.cfg.restart_cap {
        s.enter("oneshot", attempt);
        let reply = s.ask(ids::ONESHOT, &PromptContext::new().words(&words))?;
        let formatted = s.ask(ids::FORMAT_SOLUTION, &PromptContext::new().words(&words).notes(&reply))?;
        match parse_solution(&formatted, &set) {
            Ok(sol) => {
                s.event(Event::SolutionParsed { groups: Some(sol.groups.to_vec()), error: None });
                let (graded, score) = grade_solution(s.state.puzzle(), &sol);
                s.event(Event::SolutionGraded { groups: graded });
                s.set_score(score);
                return Ok(());
            }
            Err(e) => s.event(Event::SolutionParsed { groups: None, error: Some(e) }),
        }
    }
    Err(Abort::RestartCap(format!("{} malformed solutions", s.cfg.restart_cap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cartoon_herring, puzzle_430};

    fn solution(groups: Vec<Guess>) -> OneshotSolution {
        OneshotSolution { groups: groups.try_into().unwrap() }
    }

    #[test]
    fn credit_rule() {
        let p = puzzle_430();
        let all: Vec<Guess> = p.groups.iter().map(|g| g.words.clone()).collect();
        let (_, s4) = grade_solution(&p, &solution(all.clone()));
        assert_eq!((s4.solved, s4.perfect), (true, true));

        let mut three = all.clone();
        three[3] = cartoon_herring();
        let (graded, s3) = grade_solution(&p, &solution(three));
        assert_eq!((s3.solved, s3.perfect, s3.correct_count, s3.incorrect_count), (true, false, 3, 1));
        assert_eq!(graded[3].color, None);

        let mut two = all.clone();
        two[2] = cartoon_herring();
        two[3] = cartoon_herring();
        let (_, s2) = grade_solution(&p, &solution(two));
        assert_eq!((s2.solved, s2.perfect), (false, false));
    }

    #[test]
    fn duplicate_group_counts_once() {
        let p = puzzle_430();
        let y = p.groups[0].words.clone();
        let (_, s) = grade_solution(&p, &solution(vec![y.clone(), y.clone(), y.clone(), y]));
        assert_eq!(s.correct_count, 1);
    }

    #[test]
    fn parse_labeled_lines() {
        let p = puzzle_430();
        let text = "Here goes.\nGROUP 1: boo-boo, flub, gaffe, goof\nGROUP 2: DAISY, JASMINE, PETUNIA, POPPY\n\
                    GROUP 3: BUZZ, DANCE, POLLINATE, STING\nGROUP 4: BABE, LOU, MICKEY, YOGI";
        let sol = parse_solution(text, &p.words()).unwrap();
        assert_eq!(sol.groups[0], p.groups[0].words);
        assert_eq!(parse_solution("GROUP 1: BABE, LOU", &p.words()), Err(MalformedReason::WrongCount(1)));
        assert_eq!(parse_solution("", &p.words()), Err(MalformedReason::NoContent));
    }
}
