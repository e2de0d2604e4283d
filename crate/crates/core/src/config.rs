//! Flat key-value config files.
//!
//! One `key = value` pair per line, `#` comments. Keys mirror the CLI flag
//! names; command-line flags always win over config values. The `family`
//! key may repeat to list several family files.
//!
//! ```text
//! graded = wordlists/graded.csv
//! family = wordlists/families.txt
//! overrides = wordlists/overrides.csv
//! threshold = B2
//! color = #FFFF00
//! min-display-ms = 500
//! extension-ms = 300
//! parts = 30
//! top = 4
//! out-dir = out
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lexicon::CefrLevel;
use crate::srt::Color;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}:{line}: {reason}")]
    Malformed {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

/// Values read from a config file; every field optional so flags can
/// override per-setting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub graded: Option<PathBuf>,
    pub families: Vec<PathBuf>,
    pub overrides: Option<PathBuf>,
    pub alignment: Option<PathBuf>,
    pub threshold: Option<CefrLevel>,
    pub color: Option<Color>,
    pub min_display_ms: Option<u64>,
    pub extension_ms: Option<u64>,
    pub parts: Option<usize>,
    pub top: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            file: path.display().to_string(),
            source,
        })?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn parse(label: &str, text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ConfigFile::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |reason: String| ConfigError::Malformed {
                file: label.to_string(),
                line: no + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail("expected key = value".to_string()))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(fail(format!("empty value for {key:?}")));
            }
            match key {
                "graded" => cfg.graded = Some(PathBuf::from(value)),
                "family" => cfg.families.push(PathBuf::from(value)),
                "overrides" => cfg.overrides = Some(PathBuf::from(value)),
                "alignment" => cfg.alignment = Some(PathBuf::from(value)),
                "threshold" => {
                    cfg.threshold = Some(value.parse().map_err(|e| fail(format!("{e}")))?)
                }
                "color" => cfg.color = Some(value.parse().map_err(|e| fail(format!("{e}")))?),
                "min-display-ms" => {
                    cfg.min_display_ms =
                        Some(value.parse().map_err(|e| fail(format!("min-display-ms: {e}")))?)
                }
                "extension-ms" => {
                    cfg.extension_ms =
                        Some(value.parse().map_err(|e| fail(format!("extension-ms: {e}")))?)
                }
                "parts" => {
                    cfg.parts = Some(value.parse().map_err(|e| fail(format!("parts: {e}")))?)
                }
                "top" => cfg.top = Some(value.parse().map_err(|e| fail(format!("top: {e}")))?),
                "out-dir" => cfg.out_dir = Some(PathBuf::from(value)),
                other => return Err(fail(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "\
# pipeline settings
graded = g.csv
family = f1.txt
family = f2.txt
overrides = ov.csv
alignment = a.json
threshold = C1
color = #00FF00
min-display-ms = 450
extension-ms = 250
parts = 12
top = 3
out-dir = build/captions
";
        let cfg = ConfigFile::parse("test.conf", text).unwrap();
        assert_eq!(cfg.graded, Some(PathBuf::from("g.csv")));
        assert_eq!(
            cfg.families,
            vec![PathBuf::from("f1.txt"), PathBuf::from("f2.txt")]
        );
        assert_eq!(cfg.overrides, Some(PathBuf::from("ov.csv")));
        assert_eq!(cfg.alignment, Some(PathBuf::from("a.json")));
        assert_eq!(cfg.threshold, Some(CefrLevel::C1));
        assert_eq!(cfg.color, Some(Color::from_hex("#00FF00").unwrap()));
        assert_eq!(cfg.min_display_ms, Some(450));
        assert_eq!(cfg.extension_ms, Some(250));
        assert_eq!(cfg.parts, Some(12));
        assert_eq!(cfg.top, Some(3));
        assert_eq!(cfg.out_dir, Some(PathBuf::from("build/captions")));
    }

    #[test]
    fn empty_and_comments_only_is_default() {
        let cfg = ConfigFile::parse("t", "\n# nothing here\n\n").unwrap();
        assert_eq!(cfg, ConfigFile::default());
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = ConfigFile::parse("t.conf", "graded = g.csv\nbogus = 1\n").unwrap_err();
        match err {
            ConfigError::Malformed { file, line, .. } => {
                assert_eq!(file, "t.conf");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_equals_is_malformed() {
        assert!(ConfigFile::parse("t", "graded g.csv\n").is_err());
    }

    #[test]
    fn bad_value_is_malformed() {
        assert!(ConfigFile::parse("t", "threshold = Z3\n").is_err());
        assert!(ConfigFile::parse("t", "parts = many\n").is_err());
        assert!(ConfigFile::parse("t", "color = green\n").is_err());
    }
}
