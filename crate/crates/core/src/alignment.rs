//! Word-level timing.
//!
//! Produces an onset/offset in milliseconds for every word token of a
//! document. Times come from forced-alignment JSON when one is supplied
//! ([`map_alignment`]); tokens the alignment does not cover are
//! interpolated between their timed neighbors, and cues without any
//! aligned word fall back to the same proportional split used when no
//! alignment exists at all ([`proportional_timing`]).

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::srt::{tokenize, Document, Token, TokenKind, TokenPos};

/// How far an aligned time may drift outside its cue's span.
pub const CUE_SLACK_MS: u64 = 1000;

/// Below this fraction of matched word tokens the alignment is considered
/// to belong to a different text and is discarded wholesale.
pub const MIN_MATCH_RATIO: f64 = 0.20;

/// Half-width of the token window used when matching alignment words to
/// document tokens; tolerates line-order swaps of roughly this size.
pub const MATCH_WINDOW: usize = 10;

/// Errors from alignment JSON parsing.
#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("malformed alignment JSON: {0}")]
    Json(String),
    #[error("malformed alignment at word {index}: {reason}")]
    Word { index: usize, reason: String },
}

/// Whether the aligner located the word in the audio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignStatus {
    Success { start_s: f64, end_s: f64 },
    NotFoundInAudio,
}

/// One word of a forced-alignment transcript, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedWord {
    pub word: String,
    pub status: AlignStatus,
}

impl AlignedWord {
    pub fn success(word: impl Into<String>, start_s: f64, end_s: f64) -> Self {
        AlignedWord {
            word: word.into(),
            status: AlignStatus::Success { start_s, end_s },
        }
    }

    pub fn not_found(word: impl Into<String>) -> Self {
        AlignedWord {
            word: word.into(),
            status: AlignStatus::NotFoundInAudio,
        }
    }
}

#[derive(Deserialize)]
struct RawAlignment {
    words: Vec<RawWord>,
}

#[derive(Deserialize)]
struct RawWord {
    word: Option<String>,
    case: Option<String>,
    start: Option<f64>,
    end: Option<f64>,
}

/// Parse alignment JSON: an object with a `words` array whose elements
/// carry `word`, `case` (`"success"` or `"not-found-in-audio"`), and for
/// successes `start`/`end` seconds. Extra fields are ignored.
pub fn parse_alignment(json_text: &str) -> Result<Vec<AlignedWord>, AlignmentError> {
    let raw: RawAlignment =
        serde_json::from_str(json_text).map_err(|e| AlignmentError::Json(e.to_string()))?;
    let mut words = Vec::with_capacity(raw.words.len());
    for (index, raw_word) in raw.words.into_iter().enumerate() {
        let fail = |reason: &str| AlignmentError::Word {
            index,
            reason: reason.to_string(),
        };
        let word = raw_word.word.ok_or_else(|| fail("missing \"word\""))?;
        let case = raw_word.case.ok_or_else(|| fail("missing \"case\""))?;
        let status = match case.as_str() {
            "success" => {
                let start_s = raw_word.start.ok_or_else(|| fail("missing \"start\""))?;
                let end_s = raw_word.end.ok_or_else(|| fail("missing \"end\""))?;
                if !start_s.is_finite() || !end_s.is_finite() || start_s < 0.0 || end_s <= start_s
                {
                    return Err(fail("end must be greater than start and both non-negative"));
                }
                AlignStatus::Success { start_s, end_s }
            }
            "not-found-in-audio" => AlignStatus::NotFoundInAudio,
            other => return Err(fail(&format!("unknown case {other:?}"))),
        };
        words.push(AlignedWord { word, status });
    }
    Ok(words)
}

/// Where a timing entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimingSource {
    /// Taken directly from a forced-alignment word.
    Aligned,
    /// Interpolated between aligned neighbors, weighted by word length.
    Interpolated,
    /// Proportional split of the cue span by word length.
    Proportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingEntry {
    pub onset_ms: u64,
    pub offset_ms: u64,
    pub source: TimingSource,
}

/// Per-token word timing. Onsets are non-decreasing in token order within
/// a cue and every entry lies within its cue's span extended by
/// [`CUE_SLACK_MS`]. `offset > onset` holds for every entry except in the
/// degenerate proportional case of a cue with fewer milliseconds than
/// total word characters, where exact duration conservation wins and some
/// entries are zero-width.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordTiming {
    entries: BTreeMap<TokenPos, TimingEntry>,
}

impl WordTiming {
    /// Build a timing table directly from entries. The caller is
    /// responsible for the table invariants.
    pub fn from_entries(entries: BTreeMap<TokenPos, TimingEntry>) -> Self {
        WordTiming { entries }
    }

    pub fn get(&self, pos: &TokenPos) -> Option<TimingEntry> {
        self.entries.get(pos).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TokenPos, &TimingEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Split `total` among `weights` proportionally, flooring each share and
/// giving the remainder to the last entry so the parts sum exactly.
fn split_proportional(total: u64, weights: &[u64]) -> Vec<u64> {
    debug_assert!(!weights.is_empty());
    let sum: u64 = weights.iter().sum::<u64>().max(1);
    let mut parts: Vec<u64> = weights
        .iter()
        .map(|w| (total as u128 * *w as u128 / sum as u128) as u64)
        .collect();
    let assigned: u64 = parts.iter().take(parts.len() - 1).sum();
    *parts.last_mut().unwrap() = total - assigned;
    parts
}

fn char_weight(token: &Token) -> u64 {
    token.surface.chars().count().max(1) as u64
}

/// Fallback timing: each cue's span is split among its word tokens
/// proportionally to surface character length; punctuation, sound
/// descriptions, and speaker labels absorb no time. Per cue, the word
/// durations sum exactly to the cue duration.
pub fn proportional_timing(doc: &Document) -> WordTiming {
    let tokens = tokenize(doc);
    let mut timing = WordTiming::default();
    for (ci, cue) in doc.cues.iter().enumerate() {
        let words: Vec<&Token> = tokens
            .iter()
            .filter(|t| t.pos.cue == ci && t.kind == TokenKind::Word)
            .collect();
        if words.is_empty() {
            continue;
        }
        let weights: Vec<u64> = words.iter().map(|t| char_weight(t)).collect();
        let parts = split_proportional(cue.duration_ms(), &weights);
        let mut at = cue.start.millis();
        for (token, part) in words.iter().zip(parts) {
            timing.entries.insert(
                token.pos,
                TimingEntry {
                    onset_ms: at,
                    offset_ms: at + part,
                    source: TimingSource::Proportional,
                },
            );
            at += part;
        }
    }
    timing
}

/// Map forced-alignment words onto the document's word tokens.
///
/// Tokens and alignment words are matched on normalized forms with a
/// banded longest-common-subsequence (window [`MATCH_WINDOW`]); matched
/// tokens take the aligned times, unmatched tokens are interpolated
/// between timed neighbors within their cue, and cues with no match fall
/// back to a proportional split. If fewer than [`MIN_MATCH_RATIO`] of the
/// word tokens match, the whole alignment is discarded and the result
/// equals [`proportional_timing`]. Never fails.
pub fn map_alignment(doc: &Document, aligned: &[AlignedWord]) -> WordTiming {
    let tokens = tokenize(doc);
    let word_tokens: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Word)
        .collect();
    if word_tokens.is_empty() {
        return WordTiming::default();
    }

    let successes: Vec<(&str, f64, f64)> = aligned
        .iter()
        .filter_map(|w| match w.status {
            AlignStatus::Success { start_s, end_s } => Some((w.word.as_str(), start_s, end_s)),
            AlignStatus::NotFoundInAudio => None,
        })
        .collect();

    let token_forms: Vec<&str> = word_tokens.iter().map(|t| t.normalized.as_str()).collect();
    let aligned_forms: Vec<String> = successes
        .iter()
        .map(|(w, _, _)| crate::srt::normalize_form(w))
        .collect();
    let pairs = banded_lcs(&token_forms, &aligned_forms, MATCH_WINDOW);

    let ratio = pairs.len() as f64 / word_tokens.len() as f64;
    if ratio < MIN_MATCH_RATIO {
        return proportional_timing(doc);
    }

    // Aligned times per word-token index, clamped into the cue window.
    let mut assigned: Vec<Option<(u64, u64)>> = vec![None; word_tokens.len()];
    for (ti, ai) in pairs {
        let (_, start_s, end_s) = successes[ai];
        let cue = &doc.cues[word_tokens[ti].pos.cue];
        let lo = cue.start.millis().saturating_sub(CUE_SLACK_MS);
        let hi = cue.end.millis() + CUE_SLACK_MS;
        let onset = ms_from_seconds(start_s).clamp(lo, hi);
        let offset = ms_from_seconds(end_s).clamp(lo, hi);
        if offset > onset {
            assigned[ti] = Some((onset, offset));
        }
    }

    let mut timing = WordTiming::default();
    let mut idx = 0;
    for (ci, cue) in doc.cues.iter().enumerate() {
        let mut end = idx;
        while end < word_tokens.len() && word_tokens[end].pos.cue == ci {
            end += 1;
        }
        fill_cue_timing(cue, &word_tokens[idx..end], &assigned[idx..end], &mut timing);
        idx = end;
    }
    timing
}

/// Assign times to one cue's word tokens given the aligned subset, then
/// normalize so onsets are non-decreasing and every span is positive.
fn fill_cue_timing(
    cue: &crate::srt::Cue,
    tokens: &[&Token],
    aligned: &[Option<(u64, u64)>],
    timing: &mut WordTiming,
) {
    if tokens.is_empty() {
        return;
    }
    let n = tokens.len();
    let mut slots: Vec<(u64, u64, TimingSource)> = vec![(0, 0, TimingSource::Proportional); n];

    if aligned.iter().all(Option::is_none) {
        let weights: Vec<u64> = tokens.iter().map(|t| char_weight(t)).collect();
        let parts = split_proportional(cue.duration_ms(), &weights);
        let mut at = cue.start.millis();
        for (slot, part) in slots.iter_mut().zip(parts) {
            *slot = (at, at + part, TimingSource::Proportional);
            at += part;
        }
    } else {
        for (i, entry) in aligned.iter().enumerate() {
            if let Some((onset, offset)) = entry {
                slots[i] = (*onset, *offset, TimingSource::Aligned);
            }
        }
        // Interpolate every maximal run of unmatched tokens over the gap
        // between its timed neighbors (cue boundaries at the edges).
        let mut i = 0;
        while i < n {
            if aligned[i].is_some() {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < n && aligned[i].is_none() {
                i += 1;
            }
            let run_end = i; // exclusive
            let gap_lo = if run_start == 0 {
                cue.start.millis()
            } else {
                slots[run_start - 1].1
            };
            let gap_hi = if run_end == n {
                cue.end.millis()
            } else {
                slots[run_end].0
            };
            let span = gap_hi.saturating_sub(gap_lo);
            let weights: Vec<u64> = tokens[run_start..run_end]
                .iter()
                .map(|t| char_weight(t))
                .collect();
            let parts = split_proportional(span, &weights);
            let mut at = gap_lo;
            for (slot, part) in slots[run_start..run_end].iter_mut().zip(parts) {
                *slot = (at, at + part, TimingSource::Interpolated);
                at += part;
            }
        }
    }

    // Invariant repair: non-decreasing onsets, positive spans, all inside
    // the slack window.
    let hi = cue.end.millis() + CUE_SLACK_MS;
    let mut prev_onset = 0u64;
    for (i, slot) in slots.iter_mut().enumerate() {
        if i > 0 {
            slot.0 = slot.0.max(prev_onset);
        }
        slot.0 = slot.0.min(hi - 1);
        slot.1 = slot.1.clamp(slot.0 + 1, hi);
        prev_onset = slot.0;
    }

    for (token, slot) in tokens.iter().zip(slots) {
        timing.entries.insert(
            token.pos,
            TimingEntry {
                onset_ms: slot.0,
                offset_ms: slot.1,
                source: slot.2,
            },
        );
    }
}

/// Seconds to milliseconds, rounding half up.
fn ms_from_seconds(s: f64) -> u64 {
    (s * 1000.0).round().max(0.0) as u64
}

/// Longest common subsequence restricted to a diagonal band: only pairs
/// with `|i - j| <= window` may match. Returns matched (left, right) index
/// pairs in increasing order.
fn banded_lcs(a: &[&str], b: &[String], window: usize) -> Vec<(usize, usize)> {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let width = 2 * window + 2;
    let lo = |i: usize| i.saturating_sub(window);
    let hi = |i: usize| (i + window).min(m); // inclusive
    // dp[i][j - lo(i)] over the band; out-of-band cells read as 0.
    let mut dp = vec![0u32; (n + 1) * width];
    let cell = |dp: &[u32], i: usize, j: usize| -> u32 {
        if j < lo(i) || j > hi(i) {
            0
        } else {
            dp[i * width + (j - lo(i))]
        }
    };
    for i in 1..=n {
        for j in lo(i).max(1)..=hi(i) {
            let up = cell(&dp, i - 1, j);
            let left = cell(&dp, i, j - 1);
            let diag = cell(&dp, i - 1, j - 1);
            let best = if a[i - 1] == b[j - 1] {
                (diag + 1).max(up).max(left)
            } else {
                up.max(left)
            };
            dp[i * width + (j - lo(i))] = best;
        }
    }

    // Backtrack, preferring a match, then the up move on ties.
    let mut pairs = Vec::new();
    let mut i = n;
    let mut j = hi(n);
    while i > 0 && j > 0 {
        if j > hi(i) {
            j = hi(i);
            continue;
        }
        if j < lo(i).max(1) {
            i -= 1;
            continue;
        }
        let here = cell(&dp, i, j);
        if a[i - 1] == b[j - 1] && here == cell(&dp, i - 1, j - 1) + 1 {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if here == cell(&dp, i - 1, j) {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    pairs
}
