//! SubRip parser.
//!
//! Cue blocks are separated by blank lines. Styling tags may span lines
//! within a cue; tags that never close (or close without opening) inside
//! their cue are kept as literal text so no input characters are lost.

use super::{
    Color, Cue, Document, Newline, Segment, SrtError, StyleSet, StyledLine, Timestamp,
};

/// Parse SubRip text into a [`Document`].
///
/// Tolerates an optional UTF-8 BOM and CRLF newlines (both recorded on the
/// document), flexible whitespace around the `-->` arrow, and missing index
/// lines. Cues are sorted by start time (stable on ties) and renumbered.
/// Cues whose text is empty are dropped.
pub fn parse_srt(text: &str) -> Result<Document, SrtError> {
    let (text, had_bom) = match text.strip_prefix('\u{FEFF}') {
        Some(rest) => (rest, true),
        None => (text, false),
    };
    let source_newline = if text.contains("\r\n") {
        Newline::Crlf
    } else {
        Newline::Lf
    };
    let normalized = text.replace("\r\n", "\n").replace('\r', "\n");

    let mut cues = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let mut block_no = 0;
    for line in normalized.split('\n').chain(std::iter::once("")) {
        if line.trim().is_empty() {
            if !block.is_empty() {
                block_no += 1;
                if let Some(cue) = parse_block(&block, block_no)? {
                    cues.push(cue);
                }
                block.clear();
            }
        } else {
            block.push(line);
        }
    }

    if cues.is_empty() {
        return Err(SrtError::EmptyDocument);
    }
    cues.sort_by_key(|c| c.start);
    for (i, cue) in cues.iter_mut().enumerate() {
        cue.index = i as u32 + 1;
    }
    Ok(Document {
        cues,
        source_newline,
        had_bom,
    })
}

fn parse_block(lines: &[&str], block_no: usize) -> Result<Option<Cue>, SrtError> {
    // The index line is optional; whichever line parses as a timing line
    // starts the cue proper.
    let timing_at = if parse_timing(lines[0]).is_some() {
        0
    } else if is_index_line(lines[0]) && lines.len() > 1 && parse_timing(lines[1]).is_some() {
        1
    } else {
        let bad = if is_index_line(lines[0]) && lines.len() > 1 {
            lines[1]
        } else {
            lines[0]
        };
        return Err(SrtError::MalformedTimestamp {
            block: block_no,
            line: bad.to_string(),
        });
    };
    let (start, end) = parse_timing(lines[timing_at]).unwrap();
    if end <= start {
        return Err(SrtError::MalformedTimestamp {
            block: block_no,
            line: lines[timing_at].to_string(),
        });
    }

    let text_lines = &lines[timing_at + 1..];
    if text_lines.is_empty() {
        return Ok(None);
    }
    let styled = parse_cue_text(text_lines);
    if styled.is_empty() {
        return Ok(None);
    }
    Ok(Some(Cue {
        index: 0, // renumbered by the caller
        start,
        end,
        lines: styled,
    }))
}

fn is_index_line(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn parse_timing(line: &str) -> Option<(Timestamp, Timestamp)> {
    let (lhs, rhs) = line.split_once("-->")?;
    Some((Timestamp::parse(lhs)?, Timestamp::parse(rhs)?))
}

// ---------------------------------------------------------------------------
// Inline styling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TagKind {
    Italic,
    Bold,
    Font,
}

#[derive(Debug, Clone)]
enum Piece {
    Text(String),
    LineBreak,
    Open {
        kind: TagKind,
        color: Option<Color>,
        raw: String,
    },
    Close {
        kind: TagKind,
        raw: String,
    },
}

/// Parse the text lines of one cue into styled lines.
///
/// Lines that end up empty after trimming trailing whitespace are dropped.
fn parse_cue_text(lines: &[&str]) -> Vec<StyledLine> {
    let joined = lines.join("\n");
    let pieces = lex_pieces(&joined);
    let matched = match_tags(&pieces);

    let mut out: Vec<StyledLine> = Vec::new();
    let mut current: Vec<Segment> = Vec::new();
    let mut italic = 0usize;
    let mut bold = 0usize;
    let mut fonts: Vec<Color> = Vec::new();

    let push_text = |current: &mut Vec<Segment>, text: &str, it: usize, bo: usize, fonts: &[Color]| {
        current.push(Segment::new(
            text,
            StyleSet {
                italic: it > 0,
                bold: bo > 0,
                color: fonts.last().copied(),
            },
        ));
    };

    for (i, piece) in pieces.iter().enumerate() {
        match piece {
            Piece::Text(t) => push_text(&mut current, t, italic, bold, &fonts),
            Piece::LineBreak => {
                let mut line = StyledLine::new(std::mem::take(&mut current));
                line.trim_end();
                if !line.is_empty() {
                    out.push(line);
                }
            }
            Piece::Open { kind, color, raw } => {
                if matched[i] {
                    match kind {
                        TagKind::Italic => italic += 1,
                        TagKind::Bold => bold += 1,
                        TagKind::Font => fonts.push(color.unwrap()),
                    }
                } else {
                    push_text(&mut current, raw, italic, bold, &fonts);
                }
            }
            Piece::Close { kind, raw } => {
                if matched[i] {
                    match kind {
                        TagKind::Italic => italic -= 1,
                        TagKind::Bold => bold -= 1,
                        TagKind::Font => {
                            fonts.pop();
                        }
                    }
                } else {
                    push_text(&mut current, raw, italic, bold, &fonts);
                }
            }
        }
    }
    let mut line = StyledLine::new(current);
    line.trim_end();
    if !line.is_empty() {
        out.push(line);
    }
    out
}

/// Split cue text into text runs, line breaks, and recognized tags.
/// Anything that does not lex as a known tag stays in the text run.
fn lex_pieces(text: &str) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut buf = String::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            if !buf.is_empty() {
                pieces.push(Piece::Text(std::mem::take(&mut buf)));
            }
            pieces.push(Piece::LineBreak);
            i += 1;
        } else if c == '<' {
            match lex_tag(&chars[i..]) {
                Some((piece, len)) => {
                    if !buf.is_empty() {
                        pieces.push(Piece::Text(std::mem::take(&mut buf)));
                    }
                    pieces.push(piece);
                    i += len;
                }
                None => {
                    buf.push(c);
                    i += 1;
                }
            }
        } else {
            buf.push(c);
            i += 1;
        }
    }
    if !buf.is_empty() {
        pieces.push(Piece::Text(buf));
    }
    pieces
}

/// Try to lex one known tag starting at `chars[0] == '<'`. Returns the
/// piece and the number of chars consumed, or None if this is not a tag we
/// understand (the caller then treats `<` as literal text).
fn lex_tag(chars: &[char]) -> Option<(Piece, usize)> {
    let close_at = chars.iter().position(|&c| c == '>')?;
    let inner: String = chars[1..close_at].iter().collect();
    let raw: String = chars[..=close_at].iter().collect();
    let len = close_at + 1;
    if inner.contains('\n') {
        return None;
    }

    let trimmed = inner.trim();
    if let Some(name) = trimmed.strip_prefix('/') {
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "i" => TagKind::Italic,
            "b" => TagKind::Bold,
            "font" => TagKind::Font,
            _ => return None,
        };
        return Some((Piece::Close { kind, raw }, len));
    }

    match trimmed.to_ascii_lowercase().as_str() {
        "i" => {
            return Some((
                Piece::Open {
                    kind: TagKind::Italic,
                    color: None,
                    raw,
                },
                len,
            ))
        }
        "b" => {
            return Some((
                Piece::Open {
                    kind: TagKind::Bold,
                    color: None,
                    raw,
                },
                len,
            ))
        }
        _ => {}
    }

    // <font color="#RRGGBB"> with single, double, or no quotes.
    let rest = strip_prefix_ci(trimmed, "font")?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let rest = rest.trim_start();
    let rest = strip_prefix_ci(rest, "color")?;
    let rest = rest.trim_start().strip_prefix('=')?;
    let rest = rest.trim();
    let value = if let Some(q) = rest.strip_prefix('"') {
        q.strip_suffix('"')?
    } else if let Some(q) = rest.strip_prefix('\'') {
        q.strip_suffix('\'')?
    } else {
        rest
    };
    let color = Color::from_hex(value.trim())?;
    Some((
        Piece::Open {
            kind: TagKind::Font,
            color: Some(color),
            raw,
        },
        len,
    ))
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&s[prefix.len()..])
    } else {
        None
    }
}

/// Pair opens with closes of the same kind (nearest unmatched wins).
/// Returns a flag per piece: true when the tag participates in a pair;
/// unmatched tags are emitted as literal text.
fn match_tags(pieces: &[Piece]) -> Vec<bool> {
    let mut matched = vec![false; pieces.len()];
    let mut stacks: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let slot = |k: TagKind| match k {
        TagKind::Italic => 0,
        TagKind::Bold => 1,
        TagKind::Font => 2,
    };
    for (i, piece) in pieces.iter().enumerate() {
        match piece {
            Piece::Open { kind, .. } => stacks[slot(*kind)].push(i),
            Piece::Close { kind, .. } => {
                if let Some(open) = stacks[slot(*kind)].pop() {
                    matched[open] = true;
                    matched[i] = true;
                }
            }
            _ => {}
        }
    }
    matched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srt::serialize_srt;

    fn single_cue(text: &str) -> Cue {
        let srt = format!("1\n00:00:01,000 --> 00:00:02,000\n{text}\n");
        parse_srt(&srt).unwrap().cues.remove(0)
    }

    #[test]
    fn parses_minimal_cue() {
        let doc = parse_srt("1\n00:00:01,000 --> 00:00:02,000\nHello\n").unwrap();
        assert_eq!(doc.cues.len(), 1);
        let cue = &doc.cues[0];
        assert_eq!(cue.start, Timestamp::from_millis(1000));
        assert_eq!(cue.end, Timestamp::from_millis(2000));
        assert_eq!(cue.lines.len(), 1);
        assert_eq!(cue.lines[0].segments().len(), 1);
        assert_eq!(cue.lines[0].visible_text(), "Hello");
        assert!(cue.lines[0].segments()[0].style.is_plain());
    }

    #[test]
    fn parses_font_color_segments() {
        let cue = single_cue("<font color=\"#FFFF00\">spite</font> visit");
        let segs = cue.lines[0].segments();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].text, "spite");
        assert_eq!(segs[0].style.color, Some(Color::YELLOW));
        assert_eq!(segs[1].text, " visit");
        assert!(segs[1].style.is_plain());
    }

    #[test]
    fn nested_and_case_insensitive_tags() {
        let cue = single_cue("<I>a <B>b</B></I>");
        let segs = cue.lines[0].segments();
        assert_eq!(segs.len(), 2);
        assert!(segs[0].style.italic && !segs[0].style.bold);
        assert!(segs[1].style.italic && segs[1].style.bold);
    }

    #[test]
    fn unknown_tags_stay_literal() {
        let cue = single_cue("<u>under</u> and <font size=\"8\">big</font>");
        assert_eq!(
            cue.lines[0].visible_text(),
            "<u>under</u> and <font size=\"8\">big</font>"
        );
    }

    #[test]
    fn unclosed_tag_stays_literal() {
        let cue = single_cue("<i>never closed");
        assert_eq!(cue.lines[0].visible_text(), "<i>never closed");
        assert!(cue.lines[0].segments()[0].style.is_plain());
    }

    #[test]
    fn stray_close_tag_stays_literal() {
        let cue = single_cue("done</i> already");
        assert_eq!(cue.lines[0].visible_text(), "done</i> already");
    }

    #[test]
    fn italic_spanning_lines_applies_to_both() {
        let cue = single_cue("<i>first\nsecond</i>");
        assert_eq!(cue.lines.len(), 2);
        assert!(cue.lines[0].segments()[0].style.italic);
        assert!(cue.lines[1].segments()[0].style.italic);
        assert_eq!(cue.lines[0].visible_text(), "first");
        assert_eq!(cue.lines[1].visible_text(), "second");
    }

    #[test]
    fn records_bom_and_crlf() {
        let doc = parse_srt("\u{FEFF}1\r\n00:00:01,000 --> 00:00:02,000\r\nHello\r\n").unwrap();
        assert!(doc.had_bom);
        assert_eq!(doc.source_newline, Newline::Crlf);
        assert_eq!(doc.cues[0].lines[0].visible_text(), "Hello");
    }

    #[test]
    fn sorts_overlapping_cues_by_start() {
        let srt = "\
1
00:00:05,000 --> 00:00:08,000
late

2
00:00:01,000 --> 00:00:06,000
early
";
        let doc = parse_srt(srt).unwrap();
        assert_eq!(doc.cues[0].lines[0].visible_text(), "early");
        assert_eq!(doc.cues[0].index, 1);
        assert_eq!(doc.cues[1].index, 2);
    }

    #[test]
    fn missing_index_line_is_tolerated() {
        let doc = parse_srt("00:00:01,000 --> 00:00:02,000\nno index\n").unwrap();
        assert_eq!(doc.cues.len(), 1);
    }

    #[test]
    fn malformed_timestamp_reports_block() {
        let srt = "\
1
00:00:01,000 --> 00:00:02,000
ok

2
garbage time line
text
";
        match parse_srt(srt) {
            Err(SrtError::MalformedTimestamp { block, line }) => {
                assert_eq!(block, 2);
                assert_eq!(line, "garbage time line");
            }
            other => panic!("expected MalformedTimestamp, got {other:?}"),
        }
    }

    #[test]
    fn end_not_after_start_is_malformed() {
        let srt = "1\n00:00:02,000 --> 00:00:02,000\nx\n";
        assert!(matches!(
            parse_srt(srt),
            Err(SrtError::MalformedTimestamp { block: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_empty_document() {
        assert_eq!(parse_srt(""), Err(SrtError::EmptyDocument));
        assert_eq!(parse_srt("\n\n\n"), Err(SrtError::EmptyDocument));
    }

    #[test]
    fn cue_with_no_text_is_dropped() {
        let srt = "\
1
00:00:01,000 --> 00:00:02,000

2
00:00:03,000 --> 00:00:04,000
kept
";
        let doc = parse_srt(srt).unwrap();
        assert_eq!(doc.cues.len(), 1);
        assert_eq!(doc.cues[0].lines[0].visible_text(), "kept");
    }

    #[test]
    fn reparse_of_serialized_output_is_fixed_point() {
        let srt = "\
1
00:00:01,000 --> 00:00:04,000
<i>He said</i> <b>hello</b> to <font color=\"#00ff00\">her</font>

2
00:00:05,000 --> 00:00:06,500
plain with <broken tag and </i> stray close
";
        let first = parse_srt(srt).unwrap();
        let second = parse_srt(&serialize_srt(&first)).unwrap();
        assert_eq!(first, second);
    }
}
