//! Prompt catalog and placeholder rendering.
//!
//! Templates are plain UTF-8 files under `prompts/`, one per template id,
//! with the 24 brainstorming scripts under `prompts/brainstorm/`. A body may
//! use four placeholders: `[[{bad_guesses}]]`, `[[{notes}]]`,
//! `[[{template}]]` and `[[{words}]]`. The builtin catalog is compiled into
//! the binary; [`PromptCatalog::load_dir`] reads an on-disk copy and checks
//! it against the pinned checksum manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::puzzle::{Guess, Word};

pub mod ids {
    pub const VANILLA_MAKE_GUESS: &str = "vanilla.make_guess";
    pub const COT_MAKE_GUESS: &str = "cot.make_guess";
    pub const COT_SCRIPTED_MAKE_GUESS: &str = "cot_scripted.make_guess";
    pub const VANILLA_O1_MAKE_GUESS: &str = "vanilla_o1.make_guess";
    pub const ACTOR_BRAINSTORM: &str = "actor.brainstorm";
    pub const ACTOR_EXTRACT: &str = "actor.extract";
    pub const ACTOR_DISCERN: &str = "actor.discern";
    pub const ACTOR_DECIDE: &str = "actor.decide";
    pub const ACTOR_EVALUATE: &str = "actor.evaluate";
    pub const ACTOR2_EVALUATE: &str = "actor2.evaluate";
    pub const ONESHOT: &str = "oneshot";
    pub const ACTOR_O1_BRAINSTORM: &str = "actor_o1.brainstorm";
    pub const ACTOR_O1_EVALUATE: &str = "actor_o1.evaluate";
    pub const FORMAT_GUESS: &str = "format_guess";
    pub const FORMAT_DECISION: &str = "format_decision";
    pub const FORMAT_SOLUTION: &str = "format_solution";
}

pub const BRAINSTORM_TEMPLATE_COUNT: usize = 24;
pub const NO_BAD_GUESSES: &str = "Incorrect guesses so far: none.";
const BAD_GUESSES_HEADER: &str = "Incorrect guesses so far:";
const WORDS_HEADER: &str = "Puzzle words:";

const OPEN: &str = "[[{";
const CLOSE: &str = "}]]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placeholder {
    BadGuesses,
    Notes,
    Template,
    Words,
}

impl Placeholder {
    pub fn name(self) -> &'static str {
        match self {
            Placeholder::BadGuesses => "bad_guesses",
            Placeholder::Notes => "notes",
            Placeholder::Template => "template",
            Placeholder::Words => "words",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "bad_guesses" => Placeholder::BadGuesses,
            "notes" => Placeholder::Notes,
            "template" => Placeholder::Template,
            "words" => Placeholder::Words,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("prompt context is missing {0}")]
    MissingContextField(&'static str),
    #[error("prompt context word list is empty")]
    EmptyWords,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown template id {0:?}")]
    UnknownTemplate(String),
    #[error("template {id:?} uses unrecognized placeholder {token:?}")]
    UnknownPlaceholder { id: String, token: String },
    #[error("template {id:?} has an unterminated placeholder")]
    Unterminated { id: String },
    #[error("checksum mismatch for {path}: manifest {expected}, file {actual}")]
    ChecksumMismatch { path: String, expected: String, actual: String },
    #[error("malformed manifest line {0:?}")]
    Manifest(String),
    #[error("expected 24 brainstorm templates, found {0}")]
    BrainstormCount(usize),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Text(String),
    Slot(Placeholder),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    id: String,
    body: String,
    segments: Vec<Segment>,
}

impl PromptTemplate {
    pub fn new(id: impl Into<String>, body: impl Into<String>) -> Result<Self, CatalogError> {
        let id = id.into();
        let body = body.into();
        let segments = parse_segments(&id, &body)?;
        Ok(PromptTemplate { id, body, segments })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn placeholders(&self) -> Vec<Placeholder> {
        let mut v: Vec<_> = self
            .segments
            .iter()
            .filter_map(|s| match s {
                Segment::Slot(p) => Some(*p),
                Segment::Text(_) => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

fn parse_segments(id: &str, body: &str) -> Result<Vec<Segment>, CatalogError> {
    let mut segments = Vec::new();
    let mut rest = body;
    while let Some(start) = rest.find(OPEN) {
        if start > 0 {
            segments.push(Segment::Text(rest[..start].to_string()));
        }
        let after = &rest[start + OPEN.len()..];
        let end = after
            .find(CLOSE)
            .ok_or_else(|| CatalogError::Unterminated { id: id.to_string() })?;
        let name = &after[..end];
        let slot = Placeholder::from_name(name).ok_or_else(|| CatalogError::UnknownPlaceholder {
            id: id.to_string(),
            token: name.to_string(),
        })?;
        segments.push(Segment::Slot(slot));
        rest = &after[end + CLOSE.len()..];
    }
    if !rest.is_empty() {
        segments.push(Segment::Text(rest.to_string()));
    }
    Ok(segments)
}

/// One of the 24 answer-pattern scripts used by the brainstorm stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrainstormTemplate {
    index: usize,
    body: String,
}

impl BrainstormTemplate {
    /// 1-based index.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// The leading `Pattern: ...` line.
    pub fn pattern_line(&self) -> &str {
        self.body.lines().next().unwrap_or_default()
    }
}

/// Everything a template may ask for. `None` means "not supplied".
#[derive(Debug, Clone, Copy, Default)]
pub struct PromptContext<'a> {
    pub words: Option<&'a [Word]>,
    pub bad_guesses: Option<&'a [Guess]>,
    pub notes: Option<&'a str>,
    pub template: Option<&'a BrainstormTemplate>,
}

impl<'a> PromptContext<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn words(mut self, words: &'a [Word]) -> Self {
        self.words = Some(words);
        self
    }

    pub fn bad_guesses(mut self, guesses: &'a [Guess]) -> Self {
        self.bad_guesses = Some(guesses);
        self
    }

    pub fn notes(mut self, notes: &'a str) -> Self {
        self.notes = Some(notes);
        self
    }

    pub fn template(mut self, template: &'a BrainstormTemplate) -> Self {
        self.template = Some(template);
        self
    }
}

pub fn render(template: &PromptTemplate, ctx: &PromptContext<'_>) -> Result<String, RenderError> {
    let mut out = String::with_capacity(template.body.len() + 256);
    for seg in &template.segments {
        match seg {
            Segment::Text(t) => out.push_str(t),
            Segment::Slot(p) => {
                let missing = || RenderError::MissingContextField(p.name());
                match p {
                    Placeholder::BadGuesses => {
                        out.push_str(&format_bad_guesses(ctx.bad_guesses.ok_or_else(missing)?))
                    }
                    Placeholder::Notes => out.push_str(ctx.notes.ok_or_else(missing)?),
                    Placeholder::Template => out.push_str(ctx.template.ok_or_else(missing)?.body().trim_end()),
                    Placeholder::Words => {
                        let words = ctx.words.ok_or_else(missing)?;
                        if words.is_empty() {
                            return Err(RenderError::EmptyWords);
                        }
                        out.push_str(&format_words(words));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Renders the known-incorrect guesses, one sorted line per guess.
pub fn format_bad_guesses(guesses: &[Guess]) -> String {
    if guesses.is_empty() {
        return NO_BAD_GUESSES.to_string();
    }
    let mut out = String::from(BAD_GUESSES_HEADER);
    for g in guesses {
        let _ = write!(out, "\n{g}");
    }
    out
}

pub fn format_words(words: &[Word]) -> String {
    let joined = words.iter().map(Word::as_str).collect::<Vec<_>>().join(", ");
    format!("{WORDS_HEADER} {joined}")
}

/// Reads back the word list written by [`format_words`], if the text has one.
pub fn words_line(text: &str) -> Option<Vec<String>> {
    text.lines().find_map(|l| {
        l.trim()
            .strip_prefix(WORDS_HEADER)
            .map(|rest| rest.split(',').map(|w| w.trim().to_string()).filter(|w| !w.is_empty()).collect())
    })
}

macro_rules! builtin_templates {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../prompts/", $id)))),*]
    };
}

const BUILTIN: &[(&str, &str)] = builtin_templates![
    "vanilla.make_guess",
    "cot.make_guess",
    "cot_scripted.make_guess",
    "vanilla_o1.make_guess",
    "actor.brainstorm",
    "actor.extract",
    "actor.discern",
    "actor.decide",
    "actor.evaluate",
    "actor2.evaluate",
    "oneshot",
    "actor_o1.brainstorm",
    "actor_o1.evaluate",
    "format_guess",
    "format_decision",
    "format_solution",
];

const BUILTIN_BRAINSTORM: [&str; BRAINSTORM_TEMPLATE_COUNT] = [
    include_str!("../prompts/brainstorm/template_01"),
    include_str!("../prompts/brainstorm/template_02"),
    include_str!("../prompts/brainstorm/template_03"),
    include_str!("../prompts/brainstorm/template_04"),
    include_str!("../prompts/brainstorm/template_05"),
    include_str!("../prompts/brainstorm/template_06"),
    include_str!("../prompts/brainstorm/template_07"),
    include_str!("../prompts/brainstorm/template_08"),
    include_str!("../prompts/brainstorm/template_09"),
    include_str!("../prompts/brainstorm/template_10"),
    include_str!("../prompts/brainstorm/template_11"),
    include_str!("../prompts/brainstorm/template_12"),
    include_str!("../prompts/brainstorm/template_13"),
    include_str!("../prompts/brainstorm/template_14"),
    include_str!("../prompts/brainstorm/template_15"),
    include_str!("../prompts/brainstorm/template_16"),
    include_str!("../prompts/brainstorm/template_17"),
    include_str!("../prompts/brainstorm/template_18"),
    include_str!("../prompts/brainstorm/template_19"),
    include_str!("../prompts/brainstorm/template_20"),
    include_str!("../prompts/brainstorm/template_21"),
    include_str!("../prompts/brainstorm/template_22"),
    include_str!("../prompts/brainstorm/template_23"),
    include_str!("../prompts/brainstorm/template_24"),
];

/// `sha256  relative/path` per line, covering every upstream prompt text.
/// The `format_*` templates are local and unpinned.
pub const MANIFEST: &str = include_str!("../prompts/MANIFEST");

#[derive(Debug, Clone)]
pub struct PromptCatalog {
    templates: BTreeMap<String, PromptTemplate>,
    brainstorm: Vec<BrainstormTemplate>,
}

impl PromptCatalog {
    pub fn builtin() -> &'static PromptCatalog {
        static CATALOG: OnceLock<PromptCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            let templates = BUILTIN.iter().map(|(id, body)| (id.to_string(), body.to_string()));
            let brainstorm = BUILTIN_BRAINSTORM.iter().map(|b| b.to_string());
            PromptCatalog::from_parts(templates, brainstorm).expect("builtin catalog is well-formed")
        })
    }

    pub fn from_parts(
        templates: impl IntoIterator<Item = (String, String)>,
        brainstorm: impl IntoIterator<Item = String>,
    ) -> Result<Self, CatalogError> {
        let templates = templates
            .into_iter()
            .map(|(id, body)| PromptTemplate::new(id.clone(), body).map(|t| (id, t)))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        let brainstorm: Vec<BrainstormTemplate> = brainstorm
            .into_iter()
            .enumerate()
            .map(|(i, body)| BrainstormTemplate { index: i + 1, body })
            .collect();
        if brainstorm.len() != BRAINSTORM_TEMPLATE_COUNT {
            return Err(CatalogError::BrainstormCount(brainstorm.len()));
        }
        Ok(PromptCatalog { templates, brainstorm })
    }

    /// Loads a catalog directory laid out like the builtin one and verifies
    /// every file listed in its `MANIFEST`.
    pub fn load_dir(dir: &Path) -> Result<Self, CatalogError> {
        let read = |rel: &str| {
            let path = dir.join(rel);
            std::fs::read_to_string(&path).map_err(|source| CatalogError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let manifest = read("MANIFEST")?;
        verify_manifest(&manifest, |rel| read(rel))?;
        let mut templates = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|source| CatalogError::Io {
            path: dir.display().to_string(),
            source,
        })? {
            let entry = entry.map_err(|source| CatalogError::Io { path: dir.display().to_string(), source })?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if entry.path().is_file() && name != "MANIFEST" {
                templates.push((name.clone(), read(&name)?));
            }
        }
        let brainstorm = (1..=BRAINSTORM_TEMPLATE_COUNT)
            .map(|i| read(&format!("brainstorm/template_{i:02}")))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(templates, brainstorm)
    }

    pub fn get(&self, id: &str) -> Result<&PromptTemplate, CatalogError> {
        self.templates.get(id).ok_or_else(|| CatalogError::UnknownTemplate(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn templates(&self) -> impl Iterator<Item = &PromptTemplate> {
        self.templates.values()
    }

    pub fn brainstorm_templates(&self) -> &[BrainstormTemplate] {
        &self.brainstorm
    }

    /// Template for a 0-based cursor, cycling through all 24, and the next cursor.
    pub fn next_brainstorm_template(&self, cursor: usize) -> (&BrainstormTemplate, usize) {
        (&self.brainstorm[cursor % BRAINSTORM_TEMPLATE_COUNT], cursor + 1)
    }

    pub fn render(&self, id: &str, ctx: &PromptContext<'_>) -> Result<String, PromptError> {
        Ok(render(self.get(id)?, ctx)?)
    }
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Checks every `hash  path` line of a manifest using `read` to fetch files.
pub fn verify_manifest<F>(manifest: &str, mut read: F) -> Result<usize, CatalogError>
where
    F: FnMut(&str) -> Result<String, CatalogError>,
{
    let mut checked = 0;
    for line in manifest.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (expected, path) = line
            .split_once("  ")
            .ok_or_else(|| CatalogError::Manifest(line.to_string()))?;
        let actual = sha256_hex(&read(path.trim())?);
        if actual != expected {
            return Err(CatalogError::ChecksumMismatch {
                path: path.to_string(),
                expected: expected.to_string(),
                actual,
            });
        }
        checked += 1;
    }
    Ok(checked)
}
