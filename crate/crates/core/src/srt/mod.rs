//! SubRip (.srt) document model.
//!
//! Lossless parsing and serialization of SubRip files, including the inline
//! styling subset `<i>`, `<b>`, `<font color="#RRGGBB">`, plus tokenization
//! of cue text into words, punctuation, sound descriptions, and speaker
//! labels.

mod parse;
mod tokenize;

pub use parse::parse_srt;
pub use tokenize::{normalize_form, tokenize, tokenize_line};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors produced while parsing SubRip input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SrtError {
    /// The timing line of a cue block could not be parsed.
    #[error("cue block {block}: malformed timestamp line {line:?}")]
    MalformedTimestamp { block: usize, line: String },
    /// The input contained no cue blocks at all.
    #[error("empty document: no cues found")]
    EmptyDocument,
}

/// Violations found by [`Document::validate`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("cue {index}: end {end} is not after start {start}")]
    CueTimeOrder {
        index: u32,
        start: Timestamp,
        end: Timestamp,
    },
    #[error("cue {index} has no lines")]
    NoLines { index: u32 },
    #[error("cue {index}, line {line}: empty after trimming trailing whitespace")]
    EmptyLine { index: u32, line: usize },
    #[error("cue starts decrease at list position {position}")]
    UnsortedStarts { position: usize },
    #[error("cue indices not strictly increasing at list position {position}")]
    NonIncreasingIndices { position: usize },
}

/// A point in time, stored as whole milliseconds since file start.
///
/// Serializes as `HH:MM:SS,mmm`; the representable range comfortably
/// exceeds `99:59:59,999`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp {
    millis: u64,
}

impl Timestamp {
    pub const fn from_millis(millis: u64) -> Self {
        Timestamp { millis }
    }

    pub fn from_parts(hours: u64, minutes: u64, seconds: u64, millis: u64) -> Self {
        Timestamp {
            millis: hours * 3_600_000 + minutes * 60_000 + seconds * 1000 + millis,
        }
    }

    pub const fn millis(self) -> u64 {
        self.millis
    }

    pub fn saturating_sub_ms(self, ms: u64) -> Self {
        Timestamp {
            millis: self.millis.saturating_sub(ms),
        }
    }

    pub fn add_ms(self, ms: u64) -> Self {
        Timestamp {
            millis: self.millis + ms,
        }
    }

    /// Parse an SRT timestamp. Accepts `,` or `.` before the millisecond
    /// field and 1-3 millisecond digits; emits the canonical comma form.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let mut fields = s.split(':');
        let hours: u64 = parse_int_field(fields.next()?, 4)?;
        let minutes: u64 = parse_int_field(fields.next()?, 2)?;
        let rest = fields.next()?;
        if fields.next().is_some() {
            return None;
        }
        let (sec_str, ms_str) = rest.split_once([',', '.'])?;
        let seconds: u64 = parse_int_field(sec_str, 2)?;
        let ms_digits = ms_str.trim();
        if ms_digits.is_empty() || ms_digits.len() > 3 {
            return None;
        }
        let raw: u64 = parse_int_field(ms_digits, 3)?;
        let millis = raw * 10u64.pow(3 - ms_digits.len() as u32);
        Some(Timestamp::from_parts(hours, minutes, seconds, millis))
    }
}

fn parse_int_field(s: &str, max_digits: usize) -> Option<u64> {
    let s = s.trim();
    if s.is_empty() || s.len() > max_digits || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hours = self.millis / 3_600_000;
        let minutes = (self.millis % 3_600_000) / 60_000;
        let seconds = (self.millis % 60_000) / 1000;
        let millis = self.millis % 1000;
        write!(f, "{hours:02}:{minutes:02}:{seconds:02},{millis:03}")
    }
}

/// An RGB color, serialized as `#RRGGBB` (uppercase hex).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const YELLOW: Color = Color {
        r: 0xFF,
        g: 0xFF,
        b: 0x00,
    };

    /// Parse `#RRGGBB` (case-insensitive, leading `#` required).
    pub fn from_hex(s: &str) -> Option<Self> {
        let hex = s.strip_prefix('#')?;
        if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return None;
        }
        let v = u32::from_str_radix(hex, 16).ok()?;
        Some(Color {
            r: (v >> 16) as u8,
            g: (v >> 8) as u8,
            b: v as u8,
        })
    }

    pub fn to_hex(self) -> String {
        format!("#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid color {0:?}: expected #RRGGBB")]
pub struct ColorParseError(pub String);

impl FromStr for Color {
    type Err = ColorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Color::from_hex(s).ok_or_else(|| ColorParseError(s.to_string()))
    }
}

/// The styles that may apply to a text segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StyleSet {
    pub italic: bool,
    pub bold: bool,
    pub color: Option<Color>,
}

impl StyleSet {
    pub const PLAIN: StyleSet = StyleSet {
        italic: false,
        bold: false,
        color: None,
    };

    pub fn is_plain(&self) -> bool {
        *self == StyleSet::PLAIN
    }

    pub fn with_color(mut self, color: Color) -> Self {
        self.color = Some(color);
        self
    }
}

/// A run of identically styled text within a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    pub style: StyleSet,
}

impl Segment {
    pub fn new(text: impl Into<String>, style: StyleSet) -> Self {
        Segment {
            text: text.into(),
            style,
        }
    }

    pub fn plain(text: impl Into<String>) -> Self {
        Segment::new(text, StyleSet::PLAIN)
    }
}

/// One visible line of a cue, as an ordered list of styled segments.
///
/// Construction normalizes the segment list: empty segments are dropped and
/// adjacent segments with identical styles are merged, so concatenating
/// segment texts always reproduces the visible line exactly and no segment
/// is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StyledLine {
    segments: Vec<Segment>,
}

impl StyledLine {
    pub fn new(segments: Vec<Segment>) -> Self {
        let mut merged: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            if seg.text.is_empty() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.style == seg.style => last.text.push_str(&seg.text),
                _ => merged.push(seg),
            }
        }
        StyledLine { segments: merged }
    }

    pub fn plain(text: impl Into<String>) -> Self {
        StyledLine::new(vec![Segment::plain(text)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// The line text with all styling removed.
    pub fn visible_text(&self) -> String {
        self.segments.iter().map(|s| s.text.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Trim trailing whitespace off the end of the line, dropping segments
    /// that become empty.
    pub(crate) fn trim_end(&mut self) {
        while let Some(last) = self.segments.last_mut() {
            let trimmed = last.text.trim_end();
            if trimmed.is_empty() {
                self.segments.pop();
            } else {
                if trimmed.len() != last.text.len() {
                    last.text.truncate(trimmed.len());
                }
                break;
            }
        }
    }
}

/// One subtitle cue: index, time span, and styled text lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cue {
    pub index: u32,
    pub start: Timestamp,
    pub end: Timestamp,
    pub lines: Vec<StyledLine>,
}

impl Cue {
    pub fn duration_ms(&self) -> u64 {
        self.end.millis().saturating_sub(self.start.millis())
    }

    /// All line texts with styling removed.
    pub fn visible_lines(&self) -> Vec<String> {
        self.lines.iter().map(StyledLine::visible_text).collect()
    }
}

/// Newline flavor observed in the source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Newline {
    #[default]
    Lf,
    Crlf,
}

/// A parsed subtitle file: ordered cues plus source-format details.
///
/// Cue start times are non-decreasing (overlapping cues are legal) and cue
/// indices are strictly increasing. Serialization always emits LF newlines
/// without a BOM; `source_newline` and `had_bom` only record what the input
/// looked like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub cues: Vec<Cue>,
    pub source_newline: Newline,
    pub had_bom: bool,
}

impl Document {
    /// Wrap cues in a document, sorting by start time (stable) and
    /// renumbering indices 1..n so the document invariants hold.
    pub fn new(mut cues: Vec<Cue>) -> Self {
        cues.sort_by_key(|c| c.start);
        for (i, cue) in cues.iter_mut().enumerate() {
            cue.index = i as u32 + 1;
        }
        Document {
            cues,
            source_newline: Newline::Lf,
            had_bom: false,
        }
    }

    /// Check every document invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), InvariantError> {
        for (pos, cue) in self.cues.iter().enumerate() {
            if cue.end <= cue.start {
                return Err(InvariantError::CueTimeOrder {
                    index: cue.index,
                    start: cue.start,
                    end: cue.end,
                });
            }
            if cue.lines.is_empty() {
                return Err(InvariantError::NoLines { index: cue.index });
            }
            for (li, line) in cue.lines.iter().enumerate() {
                if line.visible_text().trim_end().is_empty() {
                    return Err(InvariantError::EmptyLine {
                        index: cue.index,
                        line: li,
                    });
                }
            }
            if pos > 0 {
                if self.cues[pos - 1].start > cue.start {
                    return Err(InvariantError::UnsortedStarts { position: pos });
                }
                if self.cues[pos - 1].index >= cue.index {
                    return Err(InvariantError::NonIncreasingIndices { position: pos });
                }
            }
        }
        Ok(())
    }
}

/// Kind of a token produced by [`tokenize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punctuation,
    /// A bracketed annotation such as `[footsteps approaching]`.
    SoundDescription,
    /// The leading `- ` dash marking a change of speaker.
    SpeakerLabel,
}

/// Location of a token: cue, line, and character span in the visible text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenPos {
    /// Position of the cue within `Document::cues` (0-based).
    pub cue: usize,
    /// Line within the cue (0-based).
    pub line: usize,
    /// Start character offset into the visible line text.
    pub start: usize,
    /// End character offset (exclusive).
    pub end: usize,
}

/// A tokenized unit of cue text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub pos: TokenPos,
    /// The token text exactly as it appears.
    pub surface: String,
    /// Lowercased form with U+2019 apostrophes folded to U+0027.
    pub normalized: String,
    pub kind: TokenKind,
}

/// Serialize a document to SubRip text.
///
/// Output is canonical: indices renumbered 1..n, LF newlines, no BOM, and
/// styling emitted as `<font color="#RRGGBB">`, `<i>`, `<b>` wrapped around
/// each styled segment.
pub fn serialize_srt(doc: &Document) -> String {
    let mut out = String::new();
    for (i, cue) in doc.cues.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("{}\n{} --> {}\n", i + 1, cue.start, cue.end));
        for line in &cue.lines {
            serialize_line(line, &mut out);
            out.push('\n');
        }
    }
    out
}

fn serialize_line(line: &StyledLine, out: &mut String) {
    for seg in line.segments() {
        let st = seg.style;
        if let Some(color) = st.color {
            out.push_str("<font color=\"");
            out.push_str(&color.to_hex());
            out.push_str("\">");
        }
        if st.italic {
            out.push_str("<i>");
        }
        if st.bold {
            out.push_str("<b>");
        }
        out.push_str(&seg.text);
        if st.bold {
            out.push_str("</b>");
        }
        if st.italic {
            out.push_str("</i>");
        }
        if st.color.is_some() {
            out.push_str("</font>");
        }
    }
}
