//! Tokenization of cue text.
//!
//! Every visible character of a line lands in exactly one token or in
//! inter-token whitespace. Contractions ("don't") and hyphenated compounds
//! ("well-known") are single word tokens; `[...]` / `(...)` spans become one
//! sound-description token; a leading `- ` dash is a speaker label.

use super::{Document, Token, TokenKind, TokenPos};

/// Tokenize every line of every cue, in document order.
pub fn tokenize(doc: &Document) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (ci, cue) in doc.cues.iter().enumerate() {
        for (li, line) in cue.lines.iter().enumerate() {
            tokenize_line(ci, li, &line.visible_text(), &mut tokens);
        }
    }
    tokens
}

/// Tokenize a single visible line, appending to `out`.
pub fn tokenize_line(cue: usize, line: usize, text: &str, out: &mut Vec<Token>) {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;

    let mut push = |kind: TokenKind, start: usize, end: usize| {
        let surface: String = chars[start..end].iter().collect();
        out.push(Token {
            pos: TokenPos {
                cue,
                line,
                start,
                end,
            },
            normalized: normalize_form(&surface),
            surface,
            kind,
        });
    };

    if !chars.is_empty() && chars[0] == '-' && (chars.len() == 1 || chars[1].is_whitespace()) {
        push(TokenKind::SpeakerLabel, 0, 1);
        i = 1;
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '[' || c == '(' {
            let closer = if c == '[' { ']' } else { ')' };
            if let Some(off) = chars[i + 1..].iter().position(|&x| x == closer) {
                let end = i + 1 + off + 1;
                push(TokenKind::SoundDescription, i, end);
                i = end;
                continue;
            }
            // Unclosed bracket: falls through as punctuation.
        }
        if is_word_char(c) {
            let start = i;
            i += 1;
            loop {
                if i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                } else if i + 1 < chars.len() && is_joiner(chars[i]) && is_word_char(chars[i + 1])
                {
                    i += 2;
                } else {
                    break;
                }
            }
            push(TokenKind::Word, start, i);
            continue;
        }
        let start = i;
        i += 1;
        while i < chars.len()
            && !chars[i].is_whitespace()
            && !is_word_char(chars[i])
            && chars[i] != '['
            && chars[i] != '('
        {
            i += 1;
        }
        push(TokenKind::Punctuation, start, i);
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Characters that join two word parts into one token.
fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Lowercase and fold U+2019 apostrophes to U+0027.
pub fn normalize_form(surface: &str) -> String {
    surface
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .flat_map(char::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        tokenize_line(0, 0, text, &mut out);
        out
    }

    fn kinds(tokens: &[Token]) -> Vec<TokenKind> {
        tokens.iter().map(|t| t.kind).collect()
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn contractions_are_single_words() {
        let t = toks("Don't panic!");
        assert_eq!(surfaces(&t), vec!["Don't", "panic", "!"]);
        assert_eq!(
            kinds(&t),
            vec![TokenKind::Word, TokenKind::Word, TokenKind::Punctuation]
        );
        assert_eq!(t[0].normalized, "don't");
    }

    #[test]
    fn curly_apostrophe_normalizes() {
        let t = toks("I\u{2019}m");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].surface, "I\u{2019}m");
        assert_eq!(t[0].normalized, "i'm");
    }

    #[test]
    fn bracketed_span_is_one_sound_description() {
        let t = toks("[footsteps approaching]");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TokenKind::SoundDescription);
        assert_eq!(t[0].surface, "[footsteps approaching]");
        assert_eq!(t[0].pos.start, 0);
        assert_eq!(t[0].pos.end, 23);
    }

    #[test]
    fn parenthesized_annotation_then_words() {
        let t = toks("(SIGHS) Where?");
        assert_eq!(surfaces(&t), vec!["(SIGHS)", "Where", "?"]);
        assert_eq!(t[0].kind, TokenKind::SoundDescription);
    }

    #[test]
    fn leading_dash_is_speaker_label() {
        let t = toks("- You're late.");
        assert_eq!(surfaces(&t), vec!["-", "You're", "late", "."]);
        assert_eq!(
            kinds(&t),
            vec![
                TokenKind::SpeakerLabel,
                TokenKind::Word,
                TokenKind::Word,
                TokenKind::Punctuation,
            ]
        );
    }

    #[test]
    fn hyphenated_compound_is_one_word() {
        let t = toks("a well-known fact");
        assert_eq!(surfaces(&t), vec!["a", "well-known", "fact"]);
    }

    #[test]
    fn mid_line_dash_is_punctuation() {
        let t = toks("wait - no");
        assert_eq!(surfaces(&t), vec!["wait", "-", "no"]);
        assert_eq!(t[1].kind, TokenKind::Punctuation);
    }

    #[test]
    fn digits_are_words() {
        let t = toks("call 911 at 3-D");
        assert_eq!(surfaces(&t), vec!["call", "911", "at", "3-D"]);
        assert!(t.iter().all(|t| t.kind == TokenKind::Word));
    }

    #[test]
    fn unclosed_bracket_is_punctuation() {
        let t = toks("[oops");
        assert_eq!(surfaces(&t), vec!["[", "oops"]);
        assert_eq!(t[0].kind, TokenKind::Punctuation);
    }

    #[test]
    fn spans_cover_all_non_whitespace() {
        for text in ["Don't panic!", "- You're late.", "(SIGHS) Where? [door]"] {
            let t = toks(text);
            let chars: Vec<char> = text.chars().collect();
            let mut covered = vec![false; chars.len()];
            for tok in &t {
                for flag in &mut covered[tok.pos.start..tok.pos.end] {
                    assert!(!*flag, "overlapping tokens in {text:?}");
                    *flag = true;
                }
            }
            for (i, c) in chars.iter().enumerate() {
                assert_eq!(
                    covered[i],
                    !c.is_whitespace(),
                    "char {i} ({c:?}) of {text:?}"
                );
            }
        }
    }
}
