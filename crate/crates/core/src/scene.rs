//! Keyword-density scene analysis.
//!
//! Partitions a subtitle file into `n` equal-duration slices, counts words
//! and keywords per slice, and ranks slices by keyword count so dense
//! scenes can be picked out for extraction.

use thiserror::Error;

use crate::lexicon::KeywordAnnotation;
use crate::srt::{tokenize, Document, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SceneError {
    #[error("partition count must be at least 1, got {0}")]
    InvalidPartitionCount(usize),
}

/// Statistics for one time partition of the document.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionStats {
    /// 0-based partition index.
    pub index: usize,
    /// Partition time range `[start_ms, end_ms)`; the last partition is
    /// closed at the document end.
    pub start_ms: u64,
    pub end_ms: u64,
    /// Indices (1-based cue numbers) of the first and last cue whose start
    /// lies in this partition; `None` when the partition holds no cue.
    pub cue_range: Option<(u32, u32)>,
    pub keyword_count: usize,
    pub word_count: usize,
}

impl PartitionStats {
    /// Keywords per word; zero when the partition has no words.
    pub fn density(&self) -> f64 {
        self.keyword_count as f64 / self.word_count.max(1) as f64
    }
}

/// Split the document's time span `[first cue start, last cue end]` into
/// `n` equal-duration partitions and count words/keywords per partition. A
/// cue belongs to the partition containing its start time.
pub fn partition_density(
    doc: &Document,
    ann: &KeywordAnnotation,
    n: usize,
) -> Result<Vec<PartitionStats>, SceneError> {
    if n < 1 {
        return Err(SceneError::InvalidPartitionCount(n));
    }
    let Some(first) = doc.cues.first() else {
        return Ok(Vec::new());
    };
    let span_start = first.start.millis();
    let span_end = doc.cues.iter().map(|c| c.end.millis()).max().unwrap();
    let span = span_end - span_start;

    // Boundary i = start + floor(span * i / n); boundaries[n] == span_end.
    let boundaries: Vec<u64> = (0..=n)
        .map(|i| span_start + (span as u128 * i as u128 / n as u128) as u64)
        .collect();

    let mut stats: Vec<PartitionStats> = (0..n)
        .map(|i| PartitionStats {
            index: i,
            start_ms: boundaries[i],
            end_ms: boundaries[i + 1],
            cue_range: None,
            keyword_count: 0,
            word_count: 0,
        })
        .collect();

    let word_counts: Vec<usize> = {
        let mut counts = vec![0usize; doc.cues.len()];
        for token in tokenize(doc) {
            if token.kind == TokenKind::Word {
                counts[token.pos.cue] += 1;
            }
        }
        counts
    };

    for (ci, cue) in doc.cues.iter().enumerate() {
        // Last boundary <= cue start; starts equal to span_end land in the
        // final partition.
        let pi = boundaries
            .partition_point(|&b| b <= cue.start.millis())
            .saturating_sub(1)
            .min(n - 1);
        let slot = &mut stats[pi];
        slot.word_count += word_counts[ci];
        slot.keyword_count += ann.cue_count(ci);
        slot.cue_range = match slot.cue_range {
            None => Some((cue.index, cue.index)),
            Some((first, _)) => Some((first, cue.index)),
        };
    }
    Ok(stats)
}

/// The `k` partitions with the highest keyword counts, sorted descending;
/// ties break toward the lower partition index.
pub fn top_partitions(stats: &[PartitionStats], k: usize) -> Vec<PartitionStats> {
    let mut ranked: Vec<&PartitionStats> = stats.iter().collect();
    ranked.sort_by(|a, b| {
        b.keyword_count
            .cmp(&a.keyword_count)
            .then(a.index.cmp(&b.index))
    });
    ranked.into_iter().take(k).cloned().collect()
}

/// CSV report: `partition,start_ms,end_ms,keywords,words,density`.
pub fn stats_to_csv(stats: &[PartitionStats]) -> String {
    let mut out = String::from("partition,start_ms,end_ms,keywords,words,density\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6}\n",
            s.index,
            s.start_ms,
            s.end_ms,
            s.keyword_count,
            s.word_count,
            s.density()
        ));
    }
    out
}

/// Human-readable table of the same numbers.
pub fn stats_table(stats: &[PartitionStats]) -> String {
    let mut out = String::new();
    out.push_str("part        start          end  keywords   words  density\n");
    for s in stats {
        out.push_str(&format!(
            "{:>4}  {:>11}  {:>11}  {:>8}  {:>6}  {:>7.4}\n",
            s.index,
            crate::srt::Timestamp::from_millis(s.start_ms).to_string(),
            crate::srt::Timestamp::from_millis(s.end_ms).to_string(),
            s.keyword_count,
            s.word_count,
            s.density()
        ));
    }
    out
}
