//! The four caption designs.
//!
//! From a document, its keyword annotation, and per-word timing this module
//! generates:
//!
//! 1. **Standard** — the input, canonically normalized.
//! 2. **KeywordHighlights** — identical structure with each keyword wrapped
//!    in the highlight color.
//! 3. **TimedKeywords** — only the keywords, each displayed over its spoken
//!    span. A keyword shown for less than `min_display_ms` has its display
//!    extended by `extension_ms`, or until the next caption appears.
//! 4. **TimedKeywordHighlights** — full captions split into sub-cues at the
//!    keyword onsets; each keyword is highlighted from its onset until the
//!    end of its cue.
//!
//! Overlapping keyword windows within one source cue merge into a single
//! multi-keyword cue; overlaps across source cues truncate the earlier cue
//! ([`resolve_overlaps`]).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::alignment::WordTiming;
use crate::lexicon::KeywordAnnotation;
use crate::srt::{
    tokenize, Color, Cue, Document, Segment, StyleSet, StyledLine, Timestamp, Token, TokenPos,
};

/// Which caption design to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VariantKind {
    #[default]
    Standard,
    KeywordHighlights,
    TimedKeywords,
    TimedKeywordHighlights,
}

impl VariantKind {
    pub const ALL: [VariantKind; 4] = [
        VariantKind::Standard,
        VariantKind::KeywordHighlights,
        VariantKind::TimedKeywords,
        VariantKind::TimedKeywordHighlights,
    ];

    /// The output-file suffix for this variant (`<stem>.<suffix>.srt`).
    pub fn file_suffix(self) -> &'static str {
        match self {
            VariantKind::Standard => "standard",
            VariantKind::KeywordHighlights => "kw",
            VariantKind::TimedKeywords => "timedkw",
            VariantKind::TimedKeywordHighlights => "timedhl",
        }
    }

    /// True when the variant needs word timing.
    pub fn is_timed(self) -> bool {
        matches!(
            self,
            VariantKind::TimedKeywords | VariantKind::TimedKeywordHighlights
        )
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_suffix())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid variant {0:?}: expected standard, kw, timedkw, or timedhl")]
pub struct VariantParseError(pub String);

impl FromStr for VariantKind {
    type Err = VariantParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(VariantKind::Standard),
            "kw" => Ok(VariantKind::KeywordHighlights),
            "timedkw" => Ok(VariantKind::TimedKeywords),
            "timedhl" => Ok(VariantKind::TimedKeywordHighlights),
            _ => Err(VariantParseError(s.to_string())),
        }
    }
}

/// Generation parameters shared by all variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantParams {
    pub highlight_color: Color,
    pub min_display_ms: u64,
    pub extension_ms: u64,
    pub variant: VariantKind,
}

impl Default for VariantParams {
    fn default() -> Self {
        VariantParams {
            highlight_color: Color::YELLOW,
            min_display_ms: 500,
            extension_ms: 300,
            variant: VariantKind::Standard,
        }
    }
}

/// Errors from variant generation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariantError {
    #[error("no timing entry for keyword at cue {cue}, line {line}, chars {start}..{end}")]
    MissingTiming {
        cue: usize,
        line: usize,
        start: usize,
        end: usize,
    },
}

impl VariantError {
    fn missing(pos: TokenPos) -> Self {
        VariantError::MissingTiming {
            cue: pos.cue,
            line: pos.line,
            start: pos.start,
            end: pos.end,
        }
    }
}

/// Generate the variant selected by `params.variant`.
pub fn generate_variant(
    doc: &Document,
    ann: &KeywordAnnotation,
    timing: &WordTiming,
    params: &VariantParams,
) -> Result<Document, VariantError> {
    match params.variant {
        VariantKind::Standard => Ok(gen_standard(doc)),
        VariantKind::KeywordHighlights => Ok(gen_keyword_highlights(doc, ann, params)),
        VariantKind::TimedKeywords => gen_timed_keywords(doc, ann, timing, params),
        VariantKind::TimedKeywordHighlights => {
            gen_timed_keyword_highlights(doc, ann, timing, params)
        }
    }
}

/// The baseline: text, styling, and timing unchanged; only canonical
/// normalization (renumbered indices, LF output) applies.
pub fn gen_standard(doc: &Document) -> Document {
    Document::new(doc.cues.clone())
}

/// Full captions with every annotated keyword wrapped in the highlight
/// color. Cue structure and timing are untouched.
pub fn gen_keyword_highlights(
    doc: &Document,
    ann: &KeywordAnnotation,
    params: &VariantParams,
) -> Document {
    let cues = doc
        .cues
        .iter()
        .enumerate()
        .map(|(ci, cue)| {
            let lines = cue
                .lines
                .iter()
                .enumerate()
                .map(|(li, line)| {
                    let spans: Vec<(usize, usize)> = ann
                        .positions()
                        .iter()
                        .filter(|p| p.cue == ci && p.line == li)
                        .map(|p| (p.start, p.end))
                        .collect();
                    highlight_spans(line, &spans, params.highlight_color)
                })
                .collect();
            Cue {
                index: cue.index,
                start: cue.start,
                end: cue.end,
                lines,
            }
        })
        .collect();
    Document::new(cues)
}

/// Rebuild a line with the given char spans recolored. Italic and bold
/// survive inside a highlight; only the color is replaced.
fn highlight_spans(line: &StyledLine, spans: &[(usize, usize)], color: Color) -> StyledLine {
    if spans.is_empty() {
        return line.clone();
    }
    let mut styles: Vec<StyleSet> = Vec::new();
    let mut chars: Vec<char> = Vec::new();
    for seg in line.segments() {
        for c in seg.text.chars() {
            chars.push(c);
            styles.push(seg.style);
        }
    }
    for &(start, end) in spans {
        for style in styles.iter_mut().take(end.min(chars.len())).skip(start) {
            style.color = Some(color);
        }
    }
    let segments = chars
        .into_iter()
        .zip(styles)
        .map(|(c, style)| Segment::new(c.to_string(), style))
        .collect();
    StyledLine::new(segments)
}

/// A generated cue remembering which source cue produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedCue {
    /// Position of the originating cue in the source document.
    pub source: usize,
    pub cue: Cue,
}

/// Keyword-only captions: each keyword becomes a cue over its spoken span.
///
/// A keyword displayed for less than `min_display_ms` is extended by
/// `extension_ms`, but never past the next source cue's start or the next
/// emitted caption. Keywords whose windows overlap within one source cue
/// merge into a single cue carrying all their words, space-separated in
/// token order. Sound descriptions and speaker labels are never emitted.
pub fn gen_timed_keywords(
    doc: &Document,
    ann: &KeywordAnnotation,
    timing: &WordTiming,
    params: &VariantParams,
) -> Result<Document, VariantError> {
    let keywords = keyword_tokens(doc, ann);
    let mut emitted: Vec<TimedCue> = Vec::new();

    for ci in 0..doc.cues.len() {
        let next_source_start = doc.cues.get(ci + 1).map(|c| c.start.millis());
        let mut windows: Vec<(u64, u64, Vec<String>)> = Vec::new();
        for (pos, surface) in keywords.iter().filter(|(p, _)| p.cue == ci) {
            let entry = timing.get(pos).ok_or_else(|| VariantError::missing(*pos))?;
            let (onset, mut offset) = (entry.onset_ms, entry.offset_ms);
            if offset - onset < params.min_display_ms {
                let mut extended = offset + params.extension_ms;
                if let Some(cap) = next_source_start {
                    extended = extended.min(cap);
                }
                offset = offset.max(extended);
            }
            match windows.last_mut() {
                // Overlapping windows in the same source cue merge.
                Some((_, end, words)) if onset < *end => {
                    *end = (*end).max(offset);
                    words.push(surface.clone());
                }
                _ => windows.push((onset, offset, vec![surface.clone()])),
            }
        }
        for (onset, end, words) in windows {
            emitted.push(TimedCue {
                source: ci,
                cue: Cue {
                    index: 0,
                    start: Timestamp::from_millis(onset),
                    end: Timestamp::from_millis(end),
                    lines: vec![StyledLine::plain(words.join(" "))],
                },
            });
        }
    }

    emitted.sort_by_key(|t| t.cue.start);
    let resolved = resolve_overlaps(emitted);
    Ok(Document::new(
        resolved.into_iter().map(|t| t.cue).collect(),
    ))
}

/// Full captions with keyword highlights that appear at the spoken onset.
///
/// Each source cue is split at the (clamped) onsets of its keywords; every
/// sub-cue shows the full original text with exactly the keywords whose
/// onset has been reached highlighted. Once highlighted, a keyword stays
/// highlighted until its cue ends. If any keyword's highlight residence is
/// shorter than `min_display_ms`, the final sub-cue is extended by
/// `extension_ms`, capped at the next source cue's start.
pub fn gen_timed_keyword_highlights(
    doc: &Document,
    ann: &KeywordAnnotation,
    timing: &WordTiming,
    params: &VariantParams,
) -> Result<Document, VariantError> {
    let keywords = keyword_tokens(doc, ann);
    let mut out: Vec<Cue> = Vec::new();

    for (ci, cue) in doc.cues.iter().enumerate() {
        let cue_start = cue.start.millis();
        let cue_end = cue.end.millis();
        // Keyword onsets clamped into [start, end).
        let mut onsets: Vec<(TokenPos, u64)> = Vec::new();
        for (pos, _) in keywords.iter().filter(|(p, _)| p.cue == ci) {
            let entry = timing.get(pos).ok_or_else(|| VariantError::missing(*pos))?;
            let onset = entry.onset_ms.clamp(cue_start, cue_end - 1);
            onsets.push((*pos, onset));
        }

        let mut boundaries: BTreeSet<u64> = onsets
            .iter()
            .map(|&(_, onset)| onset)
            .filter(|&t| t > cue_start)
            .collect();
        boundaries.insert(cue_start);

        // A short highlight residence extends the last sub-cue, capped at
        // the next source cue and never shortened below the original end.
        let needs_extension = onsets
            .iter()
            .any(|&(_, onset)| cue_end - onset < params.min_display_ms);
        let final_end = if needs_extension {
            let mut extended = cue_end + params.extension_ms;
            if let Some(next) = doc.cues.get(ci + 1) {
                extended = extended.min(next.start.millis());
            }
            extended.max(cue_end)
        } else {
            cue_end
        };

        let starts: Vec<u64> = boundaries.into_iter().collect();
        for (bi, &sub_start) in starts.iter().enumerate() {
            let sub_end = starts.get(bi + 1).copied().unwrap_or(final_end);
            let active: Vec<TokenPos> = onsets
                .iter()
                .filter(|&&(_, onset)| onset <= sub_start)
                .map(|&(pos, _)| pos)
                .collect();
            let lines = cue
                .lines
                .iter()
                .enumerate()
                .map(|(li, line)| {
                    let spans: Vec<(usize, usize)> = active
                        .iter()
                        .filter(|p| p.line == li)
                        .map(|p| (p.start, p.end))
                        .collect();
                    highlight_spans(line, &spans, params.highlight_color)
                })
                .collect();
            out.push(Cue {
                index: 0,
                start: Timestamp::from_millis(sub_start),
                end: Timestamp::from_millis(sub_end),
                lines,
            });
        }
    }

    Ok(Document::new(out))
}

/// Truncate overlaps between cues that came from different source cues:
/// the earlier cue ends where the later one starts. Cues truncated to
/// nothing are dropped. Input must be sorted by start; order is preserved.
pub fn resolve_overlaps(cues: Vec<TimedCue>) -> Vec<TimedCue> {
    let mut out: Vec<TimedCue> = Vec::new();
    for (i, mut timed) in cues.iter().cloned().enumerate() {
        for later in &cues[i + 1..] {
            if later.source != timed.source && later.cue.start < timed.cue.end {
                timed.cue.end = later.cue.start;
                break;
            }
        }
        if timed.cue.end > timed.cue.start {
            out.push(timed);
        }
    }
    out
}

/// Annotated keyword tokens in document order, with their surfaces.
fn keyword_tokens(doc: &Document, ann: &KeywordAnnotation) -> Vec<(TokenPos, String)> {
    tokenize(doc)
        .into_iter()
        .filter(|t| ann.contains(&t.pos))
        .map(|t: Token| (t.pos, t.surface))
        .collect()
}
