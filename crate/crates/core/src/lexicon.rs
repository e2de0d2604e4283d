//! Graded lexicon and keyword classification.
//!
//! The lexicon is the merged "non-keyword list": graded wordlist entries,
//! word-family expansions, and manual overrides, each mapping a normalized
//! form to a CEFR level. Classification is reversed: a word token is a
//! keyword when its form is *not* graded below the threshold level, is not
//! a proper name, and carries no digits. Unknown forms default to keyword;
//! the override file is the manual channel for correcting false positives.
//!
//! Precedence per form: override > exact graded entry > family expansion.
//! This keeps derived forms at their own level — a graded list may grade
//! "accept" A1 and "acceptance" C1 even if a family groups them.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::srt::{tokenize, Document, Token, TokenKind, TokenPos};

/// Errors from wordlist loading.
#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{file}:{line}: malformed wordlist line: {reason}")]
    MalformedWordlistLine {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("conflicting override directives for form {form:?}")]
    ConflictingOverride { form: String },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

/// CEFR proficiency levels, plus `Unknown` for ungraded forms.
///
/// The six graded levels are totally ordered (`A1 < ... < C2`); `Unknown`
/// does not participate in the order and is handled explicitly where it
/// matters. The default is the keyword threshold the pipeline ships with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CefrLevel {
    A1,
    A2,
    B1,
    #[default]
    B2,
    C1,
    C2,
    Unknown,
}

impl CefrLevel {
    pub const GRADED: [CefrLevel; 6] = [
        CefrLevel::A1,
        CefrLevel::A2,
        CefrLevel::B1,
        CefrLevel::B2,
        CefrLevel::C1,
        CefrLevel::C2,
    ];

    /// Position in the graded order; `None` for `Unknown`.
    pub fn rank(self) -> Option<u8> {
        match self {
            CefrLevel::A1 => Some(0),
            CefrLevel::A2 => Some(1),
            CefrLevel::B1 => Some(2),
            CefrLevel::B2 => Some(3),
            CefrLevel::C1 => Some(4),
            CefrLevel::C2 => Some(5),
            CefrLevel::Unknown => None,
        }
    }

    /// True when this level is at or above `threshold` — the keyword side
    /// of the split. `Unknown` always counts as at-least.
    pub fn at_least(self, threshold: CefrLevel) -> bool {
        match (self.rank(), threshold.rank()) {
            (Some(a), Some(b)) => a >= b,
            (None, _) => true,
            (_, None) => false,
        }
    }
}

impl fmt::Display for CefrLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CefrLevel::A1 => "A1",
            CefrLevel::A2 => "A2",
            CefrLevel::B1 => "B1",
            CefrLevel::B2 => "B2",
            CefrLevel::C1 => "C1",
            CefrLevel::C2 => "C2",
            CefrLevel::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid CEFR level {0:?}: expected one of A1, A2, B1, B2, C1, C2")]
pub struct CefrLevelParseError(pub String);

impl FromStr for CefrLevel {
    type Err = CefrLevelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(CefrLevel::A1),
            "A2" => Ok(CefrLevel::A2),
            "B1" => Ok(CefrLevel::B1),
            "B2" => Ok(CefrLevel::B2),
            "C1" => Ok(CefrLevel::C1),
            "C2" => Ok(CefrLevel::C2),
            _ => Err(CefrLevelParseError(s.to_string())),
        }
    }
}

/// Where an entry's level came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntrySource {
    Graded,
    Family,
    Override,
}

impl fmt::Display for EntrySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntrySource::Graded => "graded",
            EntrySource::Family => "family",
            EntrySource::Override => "override",
        })
    }
}

/// A graded entry: one effective level per form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub level: CefrLevel,
    pub source: EntrySource,
}

/// The merged non-keyword list plus override sets.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Entry>,
    proper_names: HashSet<String>,
    forced_keywords: HashSet<String>,
    forced_non_keywords: HashSet<String>,
    threshold: CefrLevel,
}

impl Lexicon {
    pub fn threshold(&self) -> CefrLevel {
        self.threshold
    }

    pub fn set_threshold(&mut self, threshold: CefrLevel) {
        self.threshold = threshold;
    }

    pub fn entry(&self, form: &str) -> Option<Entry> {
        self.entries.get(form).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_proper_name(&self, form: &str) -> bool {
        self.proper_names.contains(form)
    }

    pub fn proper_name_count(&self) -> usize {
        self.proper_names.len()
    }

    pub fn forced_counts(&self) -> (usize, usize) {
        (self.forced_keywords.len(), self.forced_non_keywords.len())
    }

    /// Merge detected proper names into the lexicon.
    pub fn extend_proper_names<I: IntoIterator<Item = String>>(&mut self, names: I) {
        self.proper_names.extend(names);
    }

    /// Entry counts keyed by (level rank, source), in deterministic order.
    pub fn counts(&self) -> BTreeMap<(u8, EntrySource), usize> {
        let mut counts = BTreeMap::new();
        for entry in self.entries.values() {
            let rank = entry.level.rank().unwrap_or(6);
            *counts.entry((rank, entry.source)).or_insert(0) += 1;
        }
        counts
    }

    /// Classify one token. Only `Word` tokens can be keywords; a word is a
    /// keyword when no list grades it below the threshold, it is not a
    /// proper name, and it carries no digits. Overrides win over
    /// everything.
    pub fn is_keyword(&self, token: &Token) -> bool {
        if token.kind != TokenKind::Word {
            return false;
        }
        let form = token.normalized.as_str();
        if form.chars().any(|c| c.is_numeric()) {
            return false;
        }
        if self.forced_keywords.contains(form) {
            return true;
        }
        if self.forced_non_keywords.contains(form) {
            return false;
        }
        if self.proper_names.contains(form) {
            return false;
        }
        match self.entries.get(form) {
            Some(entry) => entry.level.at_least(self.threshold),
            None => true,
        }
    }

    fn has_override(&self, form: &str) -> bool {
        self.forced_keywords.contains(form)
            || self.forced_non_keywords.contains(form)
            || self.proper_names.contains(form)
    }
}

/// Accumulates wordlist inputs and resolves precedence on build.
#[derive(Debug, Default)]
pub struct LexiconBuilder {
    graded: HashMap<String, CefrLevel>,
    family: HashMap<String, CefrLevel>,
    override_levels: HashMap<String, CefrLevel>,
    override_forms: HashSet<String>,
    proper_names: HashSet<String>,
    forced_keywords: HashSet<String>,
    forced_non_keywords: HashSet<String>,
    threshold: CefrLevel,
}

impl LexiconBuilder {
    pub fn new(threshold: CefrLevel) -> Self {
        LexiconBuilder {
            threshold,
            ..LexiconBuilder::default()
        }
    }

    /// Add a graded wordlist: one `form,level` per line, `#` comments.
    /// Duplicate forms keep the lowest (easiest) level.
    pub fn add_graded(&mut self, label: &str, text: &str) -> Result<(), LexiconError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (form, level) = split_form_level(label, no + 1, line)?;
            insert_min(&mut self.graded, form, level);
        }
        Ok(())
    }

    /// Add a word-family list: a `head,level` line followed by indented
    /// member lines. Head and members all receive the family level.
    pub fn add_family(&mut self, label: &str, text: &str) -> Result<(), LexiconError> {
        let mut current: Option<CefrLevel> = None;
        for (no, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() || raw.trim().starts_with('#') {
                continue;
            }
            let indented = raw.starts_with(' ') || raw.starts_with('\t');
            if indented {
                let level = current.ok_or_else(|| LexiconError::MalformedWordlistLine {
                    file: label.to_string(),
                    line: no + 1,
                    reason: "member line before any family head".to_string(),
                })?;
                let form = normalize_entry_form(label, no + 1, raw.trim())?;
                insert_min(&mut self.family, form, level);
            } else {
                let (head, level) = split_form_level(label, no + 1, raw.trim())?;
                insert_min(&mut self.family, head, level);
                current = Some(level);
            }
        }
        Ok(())
    }

    /// Add an override file: `form,directive[,level]` per line, with
    /// directives `force_level`, `force_keyword`, `force_non_keyword`,
    /// and `proper_name`. A form may appear only once.
    pub fn add_overrides(&mut self, label: &str, text: &str) -> Result<(), LexiconError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let form_raw = fields.next().unwrap_or("");
            let directive = fields.next().unwrap_or("");
            let level_str = fields.next();
            if fields.next().is_some() {
                return Err(LexiconError::MalformedWordlistLine {
                    file: label.to_string(),
                    line: no + 1,
                    reason: "too many fields".to_string(),
                });
            }
            let form = normalize_entry_form(label, no + 1, form_raw)?;
            if !self.override_forms.insert(form.clone()) {
                return Err(LexiconError::ConflictingOverride { form });
            }
            match directive {
                "force_level" => {
                    let level_str =
                        level_str.ok_or_else(|| LexiconError::MalformedWordlistLine {
                            file: label.to_string(),
                            line: no + 1,
                            reason: "force_level requires a level field".to_string(),
                        })?;
                    let level = parse_level(label, no + 1, level_str)?;
                    self.override_levels.insert(form, level);
                }
                "force_keyword" => {
                    self.forced_keywords.insert(form);
                }
                "force_non_keyword" => {
                    self.forced_non_keywords.insert(form);
                }
                "proper_name" => {
                    self.proper_names.insert(form);
                }
                other => {
                    return Err(LexiconError::MalformedWordlistLine {
                        file: label.to_string(),
                        line: no + 1,
                        reason: format!("unknown directive {other:?}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn build(self) -> Lexicon {
        let mut entries: HashMap<String, Entry> = HashMap::new();
        for (form, level) in self.family {
            entries.insert(
                form,
                Entry {
                    level,
                    source: EntrySource::Family,
                },
            );
        }
        for (form, level) in self.graded {
            entries.insert(
                form,
                Entry {
                    level,
                    source: EntrySource::Graded,
                },
            );
        }
        for (form, level) in self.override_levels {
            entries.insert(
                form,
                Entry {
                    level,
                    source: EntrySource::Override,
                },
            );
        }
        Lexicon {
            entries,
            proper_names: self.proper_names,
            forced_keywords: self.forced_keywords,
            forced_non_keywords: self.forced_non_keywords,
            threshold: self.threshold,
        }
    }
}

fn insert_min(map: &mut HashMap<String, CefrLevel>, form: String, level: CefrLevel) {
    map.entry(form)
        .and_modify(|existing| {
            if level.rank() < existing.rank() {
                *existing = level;
            }
        })
        .or_insert(level);
}

fn split_form_level(
    file: &str,
    line: usize,
    text: &str,
) -> Result<(String, CefrLevel), LexiconError> {
    let (form_raw, level_str) =
        text.split_once(',')
            .ok_or_else(|| LexiconError::MalformedWordlistLine {
                file: file.to_string(),
                line,
                reason: "expected form,level".to_string(),
            })?;
    if level_str.contains(',') {
        return Err(LexiconError::MalformedWordlistLine {
            file: file.to_string(),
            line,
            reason: "too many fields".to_string(),
        });
    }
    let form = normalize_entry_form(file, line, form_raw.trim())?;
    let level = parse_level(file, line, level_str.trim())?;
    Ok((form, level))
}

fn parse_level(file: &str, line: usize, s: &str) -> Result<CefrLevel, LexiconError> {
    s.parse()
        .map_err(|e: CefrLevelParseError| LexiconError::MalformedWordlistLine {
            file: file.to_string(),
            line,
            reason: e.to_string(),
        })
}

fn normalize_entry_form(file: &str, line: usize, raw: &str) -> Result<String, LexiconError> {
    if raw.is_empty() {
        return Err(LexiconError::MalformedWordlistLine {
            file: file.to_string(),
            line,
            reason: "empty form".to_string(),
        });
    }
    Ok(crate::srt::normalize_form(raw))
}

/// Build a lexicon from wordlist files.
pub fn build_lexicon(
    graded: &Path,
    families: &[PathBuf],
    overrides: Option<&Path>,
    threshold: CefrLevel,
) -> Result<Lexicon, LexiconError> {
    let mut builder = LexiconBuilder::new(threshold);
    builder.add_graded(&graded.display().to_string(), &read(graded)?)?;
    for family in families {
        builder.add_family(&family.display().to_string(), &read(family)?)?;
    }
    if let Some(path) = overrides {
        builder.add_overrides(&path.display().to_string(), &read(path)?)?;
    }
    Ok(builder.build())
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io {
        file: path.display().to_string(),
        source,
    })
}

/// Keyword positions for one document, with per-cue counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeywordAnnotation {
    keywords: BTreeSet<TokenPos>,
    per_cue: BTreeMap<usize, usize>,
}

impl KeywordAnnotation {
    pub fn positions(&self) -> &BTreeSet<TokenPos> {
        &self.keywords
    }

    pub fn contains(&self, pos: &TokenPos) -> bool {
        self.keywords.contains(pos)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// Number of keywords in the given cue (0-based position).
    pub fn cue_count(&self, cue: usize) -> usize {
        self.per_cue.get(&cue).copied().unwrap_or(0)
    }
}

/// Mark every keyword token of the document.
pub fn annotate(lex: &Lexicon, doc: &Document) -> KeywordAnnotation {
    let mut ann = KeywordAnnotation::default();
    for token in tokenize(doc) {
        if lex.is_keyword(&token) {
            ann.keywords.insert(token.pos);
            *ann.per_cue.entry(token.pos.cue).or_insert(0) += 1;
        }
    }
    ann
}

/// Heuristic proper-name detection.
///
/// A form counts as a proper name when it is capitalized at every
/// occurrence, occurs at least once in a non-sentence-initial position,
/// and is not already listed in the lexicon or its overrides.
pub fn detect_proper_names(doc: &Document, lex: &Lexicon) -> BTreeSet<String> {
    struct FormStats {
        always_capitalized: bool,
        mid_sentence: bool,
    }
    let mut stats: HashMap<String, FormStats> = HashMap::new();

    let mut sentence_start = true;
    let mut prev_line: Option<(usize, usize)> = None;
    for token in tokenize(doc) {
        let line_key = (token.pos.cue, token.pos.line);
        if prev_line != Some(line_key) {
            sentence_start = true;
            prev_line = Some(line_key);
        }
        match token.kind {
            TokenKind::Word => {
                let capitalized = token.surface.chars().next().is_some_and(char::is_uppercase);
                let entry = stats.entry(token.normalized.clone()).or_insert(FormStats {
                    always_capitalized: true,
                    mid_sentence: false,
                });
                entry.always_capitalized &= capitalized;
                entry.mid_sentence |= !sentence_start;
                sentence_start = false;
            }
            TokenKind::Punctuation => {
                if token
                    .surface
                    .chars()
                    .any(|c| matches!(c, '.' | '!' | '?' | '\u{2026}'))
                {
                    sentence_start = true;
                }
            }
            TokenKind::SoundDescription | TokenKind::SpeakerLabel => {}
        }
    }

    stats
        .into_iter()
        .filter(|(form, s)| {
            s.always_capitalized
                && s.mid_sentence
                && lex.entry(form).is_none()
                && !lex.has_override(form)
        })
        .map(|(form, _)| form)
        .collect()
}
