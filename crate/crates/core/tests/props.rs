//! Property-based checks: parser/serializer fixed points, tokenizer
//! coverage, timing conservation, threshold monotonicity, and the
//! overlap-resolution sweep.

use proptest::prelude::*;

use lexicap::alignment::proportional_timing;
use lexicap::lexicon::{annotate, CefrLevel, LexiconBuilder};
use lexicap::srt::{
    parse_srt, serialize_srt, tokenize, tokenize_line, Color, Cue, Document, Segment, StyleSet,
    StyledLine, Timestamp, TokenKind,
};
use lexicap::variants::{resolve_overlaps, TimedCue};

// ---------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------

/// Words without tag or bracket characters, so styling survives a
/// serialize/parse cycle losslessly.
fn arb_word() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-zA-Z']{0,9}".prop_map(|s| s)
}

fn arb_style() -> impl Strategy<Value = StyleSet> {
    (any::<bool>(), any::<bool>(), proptest::option::of(0u32..0xFFFFFF)).prop_map(
        |(italic, bold, color)| StyleSet {
            italic,
            bold,
            color: color.map(|v| Color {
                r: (v >> 16) as u8,
                g: (v >> 8) as u8,
                b: v as u8,
            }),
        },
    )
}

fn arb_line() -> impl Strategy<Value = StyledLine> {
    proptest::collection::vec((arb_word(), arb_style()), 1..6).prop_map(|parts| {
        let segments = parts
            .into_iter()
            .enumerate()
            .map(|(i, (word, style))| {
                let text = if i == 0 { word } else { format!(" {word}") };
                Segment::new(text, style)
            })
            .collect();
        StyledLine::new(segments)
    })
}

fn arb_document() -> impl Strategy<Value = Document> {
    proptest::collection::vec(
        (0u64..100_000, 1u64..20_000, proptest::collection::vec(arb_line(), 1..4)),
        1..12,
    )
    .prop_map(|cues| {
        let mut at = 0u64;
        let cues = cues
            .into_iter()
            .map(|(gap, duration, lines)| {
                let start = at + gap % 5_000;
                let end = start + duration;
                at = start + 1; // starts non-decreasing, overlaps allowed
                Cue {
                    index: 0,
                    start: Timestamp::from_millis(start),
                    end: Timestamp::from_millis(end),
                    lines,
                }
            })
            .collect();
        Document::new(cues)
    })
}

proptest! {
    /// parse(serialize(D)) == D for generated documents.
    #[test]
    fn prop_document_round_trip(doc in arb_document()) {
        let text = serialize_srt(&doc);
        let parsed = parse_srt(&text).unwrap();
        prop_assert_eq!(parsed, doc);
    }

    /// For arbitrary text content (tag punctuation included), one parse
    /// reaches a fixed point of parse ∘ serialize.
    #[test]
    fn prop_parse_serialize_fixed_point_on_noise(
        lines in proptest::collection::vec("[ -~]{1,40}", 1..5)
    ) {
        let mut body = String::from("1\n00:00:01,000 --> 00:00:05,000\n");
        for line in &lines {
            body.push_str(line);
            body.push('\n');
        }
        // Some generated bodies collapse to nothing (whitespace-only
        // cue text); those legitimately parse to EmptyDocument.
        let Ok(first) = parse_srt(&body) else { return Ok(()); };
        let second = parse_srt(&serialize_srt(&first)).unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(serialize_srt(&second), serialize_srt(&first));
    }

    /// Tokens are ordered, non-overlapping, cover every non-whitespace
    /// character, and surfaces match their spans.
    #[test]
    fn prop_tokenizer_coverage(text in "[ -~]{0,60}") {
        let mut tokens = Vec::new();
        tokenize_line(0, 0, &text, &mut tokens);
        let chars: Vec<char> = text.chars().collect();
        let mut covered = vec![false; chars.len()];
        let mut prev_end = 0usize;
        for t in &tokens {
            prop_assert!(t.pos.start >= prev_end, "tokens out of order");
            prop_assert!(t.pos.end > t.pos.start);
            let surface: String = chars[t.pos.start..t.pos.end].iter().collect();
            prop_assert_eq!(&surface, &t.surface);
            for c in &mut covered[t.pos.start..t.pos.end] {
                *c = true;
            }
            prev_end = t.pos.end;
        }
        // Every non-whitespace char is covered; anything uncovered is
        // inter-token whitespace. (Whitespace inside a sound-description
        // span is covered by that token.)
        for (i, c) in chars.iter().enumerate() {
            if !c.is_whitespace() {
                prop_assert!(covered[i], "char {} ({:?}) not covered", i, c);
            }
        }
    }

    /// Per cue, proportional word durations sum exactly to the cue
    /// duration, onsets are monotone, and spans stay inside the cue.
    #[test]
    fn prop_proportional_conservation(doc in arb_document()) {
        let timing = proportional_timing(&doc);
        for (ci, cue) in doc.cues.iter().enumerate() {
            let entries: Vec<_> = timing
                .iter()
                .filter(|(pos, _)| pos.cue == ci)
                .map(|(_, e)| *e)
                .collect();
            let words = tokenize(&doc)
                .into_iter()
                .filter(|t| t.pos.cue == ci && t.kind == TokenKind::Word)
                .count();
            prop_assert_eq!(entries.len(), words);
            if entries.is_empty() {
                continue;
            }
            let sum: u64 = entries.iter().map(|e| e.offset_ms - e.onset_ms).sum();
            prop_assert_eq!(sum, cue.duration_ms(), "cue {}", ci);
            // Flooring can zero-width a word only when the cue has fewer
            // milliseconds than total word characters.
            let total_weight: u64 = tokenize(&doc)
                .into_iter()
                .filter(|t| t.pos.cue == ci && t.kind == TokenKind::Word)
                .map(|t| t.surface.chars().count() as u64)
                .sum();
            let strict = cue.duration_ms() >= total_weight;
            let mut prev = cue.start.millis();
            for e in &entries {
                prop_assert!(e.onset_ms >= prev);
                prop_assert!(e.offset_ms >= e.onset_ms);
                if strict {
                    prop_assert!(e.offset_ms > e.onset_ms);
                }
                prop_assert!(e.offset_ms <= cue.end.millis());
                prev = e.onset_ms;
            }
        }
    }

    /// Raising the threshold never adds keywords.
    #[test]
    fn prop_threshold_monotonic(
        doc in arb_document(),
        graded_levels in proptest::collection::vec(0usize..6, 0..40),
        lo in 1u8..5,
    ) {
        // Grade a prefix of the document's forms with arbitrary levels.
        let forms: Vec<String> = tokenize(&doc)
            .into_iter()
            .filter(|t| t.kind == TokenKind::Word)
            .map(|t| t.normalized)
            .collect();
        let mut graded = String::new();
        for (form, level_idx) in forms.iter().zip(graded_levels.iter()) {
            graded.push_str(&format!("{},{}\n", form, CefrLevel::GRADED[*level_idx]));
        }
        let mut builder = LexiconBuilder::new(CefrLevel::GRADED[lo as usize]);
        builder.add_graded("gen.csv", &graded).unwrap();
        let lex_lo = builder.build();
        let mut lex_hi = lex_lo.clone();
        lex_hi.set_threshold(CefrLevel::GRADED[lo as usize + 1]);

        let kw_lo = annotate(&lex_lo, &doc);
        let kw_hi = annotate(&lex_hi, &doc);
        prop_assert!(kw_hi.positions().is_subset(kw_lo.positions()));
    }
}

// ---------------------------------------------------------------------
// Overlap resolution vs a brute-force sweep oracle
// ---------------------------------------------------------------------

fn arb_timed_cues() -> impl Strategy<Value = Vec<TimedCue>> {
    proptest::collection::vec((0usize..6, 0u64..10_000, 1u64..3_000), 0..20).prop_map(|raw| {
        let mut cues: Vec<TimedCue> = raw
            .into_iter()
            .map(|(source, start, len)| TimedCue {
                source,
                cue: Cue {
                    index: 0,
                    start: Timestamp::from_millis(start),
                    end: Timestamp::from_millis(start + len),
                    lines: vec![StyledLine::plain("w")],
                },
            })
            .collect();
        cues.sort_by_key(|t| t.cue.start);
        cues
    })
}

proptest! {
    #[test]
    fn prop_resolve_overlaps_sweep(cues in arb_timed_cues()) {
        let input = cues.clone();
        let out = resolve_overlaps(cues);

        // Oracle: recompute each cue's truncated end by scanning all later
        // cues from other sources.
        let mut expected = Vec::new();
        for (i, timed) in input.iter().enumerate() {
            let mut end = timed.cue.end;
            for later in &input[i + 1..] {
                if later.source != timed.source && later.cue.start < end {
                    end = end.min(later.cue.start);
                }
            }
            if end > timed.cue.start {
                let mut cue = timed.cue.clone();
                cue.end = end;
                expected.push(TimedCue { source: timed.source, cue });
            }
        }
        prop_assert_eq!(&out, &expected);

        // Pairwise: no overlap remains between different-source cues.
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                if a.source != b.source {
                    prop_assert!(
                        a.cue.end <= b.cue.start || b.cue.end <= a.cue.start,
                        "overlap survived"
                    );
                }
            }
        }

        // Order preserved: starts non-decreasing.
        for pair in out.windows(2) {
            prop_assert!(pair[0].cue.start <= pair[1].cue.start);
        }
    }
}
