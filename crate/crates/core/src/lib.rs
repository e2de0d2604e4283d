//! Caption enhancement toolkit for language learners.
//!
//! Transforms SubRip subtitle files into enhanced caption variants built
//! around graded-vocabulary keyword detection and word-level timing:
//!
//! - **standard** — the input captions, canonically normalized;
//! - **keyword highlights** — full captions with keywords colored;
//! - **timed keywords** — only keywords, each shown when it is spoken;
//! - **timed keyword highlights** — full captions where each keyword
//!   switches to its highlight color at its spoken onset.
//!
//! Keywords follow a reverse approach: a word is a keyword unless it occurs
//! in the merged graded wordlists at or below the configured threshold
//! level ([`lexicon`]). Word onsets come from forced-alignment JSON when
//! available, with a proportional per-cue fallback ([`alignment`]).
//! [`scene`] ranks partitions of a file by keyword density for scene
//! selection.

pub mod alignment;
pub mod cli;
pub mod config;
pub mod lexicon;
pub mod scene;
pub mod srt;
pub mod variants;
