//! Round-trip and text-preservation checks over the fixture corpus.

use std::fs;
use std::path::PathBuf;

use lexicap::srt::{parse_srt, serialize_srt, Document};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(fixture_dir())
        .unwrap()
        .filter_map(|entry| {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "srt") {
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                Some((name, fs::read_to_string(&path).unwrap()))
            } else {
                None
            }
        })
        .collect();
    files.sort();
    assert!(files.len() >= 10, "corpus too small: {}", files.len());
    files
}

/// parse ∘ serialize is a fixed point on every parsed fixture.
/// `source_newline`/`had_bom` record input format and are normalized away
/// by serialization, so the comparison covers cue content.
#[test]
fn parse_serialize_fixed_point_on_corpus() {
    for (name, text) in corpus() {
        let first: Document = parse_srt(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let serialized = serialize_srt(&first);
        let second = parse_srt(&serialized).unwrap_or_else(|e| panic!("{name} reparse: {e}"));
        assert_eq!(first.cues, second.cues, "{name}: reparse differs");
        assert_eq!(second.source_newline, lexicap::srt::Newline::Lf);
        assert!(!second.had_bom);
        // And serialization itself is idempotent from there on.
        assert_eq!(serialized, serialize_srt(&second), "{name}: reserialize differs");
    }
}

/// Strip the recognized styling tags from raw text. Independent of the
/// parser: a plain scanner that removes `<i>`, `<b>`, `</...>`, and
/// `<font ...>` spellings case-insensitively.
fn strip_tags(line: &str) -> String {
    let mut out = String::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '<' {
            if let Some(close) = chars[i..].iter().position(|&c| c == '>') {
                let inner: String = chars[i + 1..i + close].iter().collect();
                let name = inner
                    .trim()
                    .trim_start_matches('/')
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_ascii_lowercase();
                if name == "i" || name == "b" || name == "font" {
                    i += close + 1;
                    continue;
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Visible cue text lines of raw SRT, markup-stripped, trailing whitespace
/// trimmed, empty lines dropped.
fn stripped_lines(text: &str) -> Vec<String> {
    let text = text.strip_prefix('\u{FEFF}').unwrap_or(text);
    let normalized = text.replace("\r\n", "\n").replace('\r', "\n");
    let mut lines = Vec::new();
    for block in normalized.split("\n\n") {
        let block_lines: Vec<&str> = block
            .lines()
            .filter(|l| !l.trim().is_empty())
            .collect();
        let Some(timing_at) = block_lines.iter().position(|l| l.contains("-->")) else {
            continue;
        };
        for raw in &block_lines[timing_at + 1..] {
            let stripped = strip_tags(raw);
            let stripped = stripped.trim_end();
            if !stripped.is_empty() {
                lines.push(stripped.to_string());
            }
        }
    }
    lines
}

/// serialize ∘ parse preserves the markup-stripped visible text.
/// (Fixtures keep cues in start order, so line order survives the
/// parser's stable sort.)
#[test]
fn text_preserved_through_round_trip() {
    for (name, text) in corpus() {
        let doc = parse_srt(&text).unwrap();
        let out = serialize_srt(&doc);
        assert_eq!(
            stripped_lines(&out),
            stripped_lines(&text),
            "{name}: visible text changed"
        );
    }
}

/// Every parsed fixture satisfies the document invariants.
#[test]
fn corpus_documents_validate() {
    for (name, text) in corpus() {
        let doc = parse_srt(&text).unwrap();
        doc.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

/// Identical input bytes give identical output bytes.
#[test]
fn serialization_is_deterministic() {
    for (_, text) in corpus() {
        let a = serialize_srt(&parse_srt(&text).unwrap());
        let b = serialize_srt(&parse_srt(&text).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn crlf_and_bom_flags_recorded() {
    let crlf = fs::read_to_string(fixture_dir().join("crlf.srt")).unwrap();
    let doc = parse_srt(&crlf).unwrap();
    assert_eq!(doc.source_newline, lexicap::srt::Newline::Crlf);
    assert!(!doc.had_bom);
    // Output is LF-only, BOM-free.
    let out = serialize_srt(&doc);
    assert!(!out.contains('\r'));

    let bom = fs::read_to_string(fixture_dir().join("bom.srt")).unwrap();
    let doc = parse_srt(&bom).unwrap();
    assert!(doc.had_bom);
    assert!(!serialize_srt(&doc).starts_with('\u{FEFF}'));
}
