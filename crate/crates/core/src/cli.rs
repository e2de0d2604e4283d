//! Command-line front end.
//!
//! Three commands drive the pipeline end to end:
//!
//! - `lexicap lexicon build` — build the lexicon and print a summary;
//! - `lexicap generate` — write caption variant files for an input srt;
//! - `lexicap analyze` — keyword-density partition report.
//!
//! Exit codes: 0 success, 1 input srt error, 2 config or wordlist error,
//! 3 alignment error. Output files are written to a temporary file and
//! renamed into place, so a failing run never leaves a half-written file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alignment::{map_alignment, parse_alignment, proportional_timing, WordTiming};
use crate::config::ConfigFile;
use crate::lexicon::{annotate, build_lexicon, detect_proper_names, CefrLevel, EntrySource, Lexicon};
use crate::scene::{partition_density, stats_table, stats_to_csv, top_partitions};
use crate::srt::{parse_srt, serialize_srt, Color, Document};
use crate::variants::{generate_variant, VariantKind, VariantParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SRT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ALIGNMENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lexicap",
    version,
    about = "Generate keyword-enhanced caption variants from SubRip subtitles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wordlist lexicon operations.
    Lexicon {
        #[command(subcommand)]
        command: LexiconCommand,
    },
    /// Generate caption variant file(s) from an input srt.
    Generate(GenerateArgs),
    /// Report keyword density over equal-duration partitions.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Subcommand)]
enum LexiconCommand {
    /// Build the lexicon from wordlists and print a summary report.
    Build(LexiconArgs),
}

#[derive(Debug, Args, Clone)]
struct LexiconArgs {
    /// Graded wordlist CSV (`form,level` per line).
    #[arg(long)]
    graded: Option<PathBuf>,
    /// Word-family list (`head,level` plus indented members); repeatable.
    #[arg(long = "family")]
    families: Vec<PathBuf>,
    /// Override CSV (`form,directive[,level]`).
    #[arg(long)]
    overrides: Option<PathBuf>,
    /// Keyword threshold level (A2..C2).
    #[arg(long)]
    threshold: Option<CefrLevel>,
    /// Key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Input SubRip file.
    input: PathBuf,
    /// Which variant to generate.
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Forced-alignment JSON; timed variants fall back to proportional
    /// timing (with a notice on stderr) when absent.
    #[arg(long)]
    alignment: Option<PathBuf>,
    /// Highlight color as #RRGGBB.
    #[arg(long)]
    color: Option<Color>,
    /// Minimum keyword display duration in milliseconds.
    #[arg(long = "min-display-ms")]
    min_display_ms: Option<u64>,
    /// Display extension in milliseconds for short keywords.
    #[arg(long = "extension-ms")]
    extension_ms: Option<u64>,
    /// Output directory (defaults to the input file's directory).
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input SubRip file.
    input: PathBuf,
    /// Number of equal-duration partitions.
    #[arg(long)]
    parts: Option<usize>,
    /// How many top partitions to list.
    #[arg(long)]
    top: Option<usize>,
    /// Output directory for the CSV report.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Standard,
    Kw,
    Timedkw,
    Timedhl,
    All,
}

impl VariantArg {
    fn kinds(self) -> Vec<VariantKind> {
        match self {
            VariantArg::Standard => vec![VariantKind::Standard],
            VariantArg::Kw => vec![VariantKind::KeywordHighlights],
            VariantArg::Timedkw => vec![VariantKind::TimedKeywords],
            VariantArg::Timedhl => vec![VariantKind::TimedKeywordHighlights],
            VariantArg::All => VariantKind::ALL.to_vec(),
        }
    }
}

/// A CLI failure carrying its exit code.
#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn srt(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SRT,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn alignment(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_ALIGNMENT,
            message: message.into(),
        }
    }
}

impl From<crate::lexicon::LexiconError> for CliError {
    fn from(e: crate::lexicon::LexiconError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<crate::srt::SrtError> for CliError {
    fn from(e: crate::srt::SrtError) -> Self {
        CliError::srt(e.to_string())
    }
}

impl From<crate::alignment::AlignmentError> for CliError {
    fn from(e: crate::alignment::AlignmentError) -> Self {
        CliError::alignment(e.to_string())
    }
}

impl From<crate::variants::VariantError> for CliError {
    fn from(e: crate::variants::VariantError) -> Self {
        CliError::srt(e.to_string())
    }
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Lexicon {
            command: LexiconCommand::Build(args),
        } => cmd_lexicon_build(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Lexicon inputs after merging config-file values under the flags.
struct LexiconInputs {
    graded: PathBuf,
    families: Vec<PathBuf>,
    overrides: Option<PathBuf>,
    threshold: CefrLevel,
    config: ConfigFile,
}

fn resolve_lexicon_inputs(args: &LexiconArgs) -> Result<LexiconInputs, CliError> {
    let config = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let graded = args
        .graded
        .clone()
        .or_else(|| config.graded.clone())
        .ok_or_else(|| CliError::config("no graded wordlist given (--graded or config)"))?;
    let families = if args.families.is_empty() {
        config.families.clone()
    } else {
        args.families.clone()
    };
    let overrides = args.overrides.clone().or_else(|| config.overrides.clone());
    let threshold = args.threshold.or(config.threshold).unwrap_or_default();
    match threshold.rank() {
        Some(1..=5) => {}
        _ => {
            return Err(CliError::config(format!(
                "threshold must be between A2 and C2, got {threshold}"
            )))
        }
    }
    Ok(LexiconInputs {
        graded,
        families,
        overrides,
        threshold,
        config,
    })
}

fn load_lexicon(inputs: &LexiconInputs) -> Result<Lexicon, CliError> {
    Ok(build_lexicon(
        &inputs.graded,
        &inputs.families,
        inputs.overrides.as_deref(),
        inputs.threshold,
    )?)
}

fn cmd_lexicon_build(args: LexiconArgs) -> Result<(), CliError> {
    let inputs = resolve_lexicon_inputs(&args)?;
    let lex = load_lexicon(&inputs)?;
    print!("{}", lexicon_report(&lex));
    Ok(())
}

fn lexicon_report(lex: &Lexicon) -> String {
    let counts = lex.counts();
    let sources = [
        EntrySource::Graded,
        EntrySource::Family,
        EntrySource::Override,
    ];
    let mut out = format!(
        "lexicon: {} entries (threshold {})\n",
        lex.len(),
        lex.threshold()
    );
    out.push_str("level   graded   family override    total\n");
    for (rank, level) in CefrLevel::GRADED.iter().enumerate() {
        let per: Vec<usize> = sources
            .iter()
            .map(|s| counts.get(&(rank as u8, *s)).copied().unwrap_or(0))
            .collect();
        out.push_str(&format!(
            "{:<5} {:>8} {:>8} {:>8} {:>8}\n",
            level.to_string(),
            per[0],
            per[1],
            per[2],
            per.iter().sum::<usize>()
        ));
    }
    let (forced_kw, forced_non_kw) = lex.forced_counts();
    out.push_str(&format!(
        "proper names: {}\nforced keywords: {}\nforced non-keywords: {}\n",
        lex.proper_name_count(),
        forced_kw,
        forced_non_kw
    ));
    out
}

fn load_document(path: &Path) -> Result<Document, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::srt(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::srt(format!("{} is not valid UTF-8", path.display())))?;
    Ok(parse_srt(&text)?)
}

/// Build lexicon, fold in detected proper names, and annotate.
fn annotate_document(
    doc: &Document,
    inputs: &LexiconInputs,
) -> Result<(Lexicon, crate::lexicon::KeywordAnnotation), CliError> {
    let mut lex = load_lexicon(inputs)?;
    let names = detect_proper_names(doc, &lex);
    lex.extend_proper_names(names);
    let ann = annotate(&lex, doc);
    Ok((lex, ann))
}

fn load_timing(
    doc: &Document,
    alignment_path: Option<&Path>,
    needs_timing: bool,
) -> Result<WordTiming, CliError> {
    match alignment_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::alignment(format!("cannot read {}: {e}", path.display())))?;
            let words = parse_alignment(&text)?;
            Ok(map_alignment(doc, &words))
        }
        None => {
            if needs_timing {
                eprintln!(
                    "note: no alignment file provided; timed variants use proportional word timing"
                );
            }
            Ok(proportional_timing(doc))
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let inputs = resolve_lexicon_inputs(&args.lexicon)?;
    let doc = load_document(&args.input)?;
    let (_, ann) = annotate_document(&doc, &inputs)?;

    let kinds = args.variant.kinds();
    let alignment_path = args.alignment.clone().or_else(|| inputs.config.alignment.clone());
    let needs_timing = kinds.iter().any(|k| k.is_timed());
    let timing = load_timing(&doc, alignment_path.as_deref(), needs_timing)?;

    let base = VariantParams {
        highlight_color: args
            .color
            .or(inputs.config.color)
            .unwrap_or(Color::YELLOW),
        min_display_ms: args
            .min_display_ms
            .or(inputs.config.min_display_ms)
            .unwrap_or(500),
        extension_ms: args
            .extension_ms
            .or(inputs.config.extension_ms)
            .unwrap_or(300),
        variant: VariantKind::Standard,
    };

    let out_dir = resolve_out_dir(args.out_dir.or_else(|| inputs.config.out_dir.clone()), &args.input);
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "captions".to_string());

    // Generate everything first so an error never leaves partial output.
    let mut outputs: Vec<(PathBuf, String)> = Vec::new();
    for kind in kinds {
        let params = VariantParams {
            variant: kind,
            ..base
        };
        let generated = generate_variant(&doc, &ann, &timing, &params)?;
        let path = out_dir.join(format!("{stem}.{}.srt", kind.file_suffix()));
        outputs.push((path, serialize_srt(&generated)));
    }
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;
    for (path, text) in outputs {
        write_atomic(&path, text.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let inputs = resolve_lexicon_inputs(&args.lexicon)?;
    let parts = args.parts.or(inputs.config.parts).unwrap_or(30);
    let top = args.top.or(inputs.config.top).unwrap_or(4);
    if parts < 1 {
        return Err(CliError::config("--parts must be at least 1"));
    }
    if top < 1 || top > parts {
        return Err(CliError::config(format!(
            "--top must be between 1 and the partition count ({parts})"
        )));
    }

    let doc = load_document(&args.input)?;
    let (_, ann) = annotate_document(&doc, &inputs)?;
    let stats = partition_density(&doc, &ann, parts)
        .map_err(|e| CliError::config(e.to_string()))?;

    print!("{}", stats_table(&stats));
    println!("top {top} partitions by keyword count:");
    for s in top_partitions(&stats, top) {
        println!(
            "  partition {} [{} - {}]: {} keywords",
            s.index,
            crate::srt::Timestamp::from_millis(s.start_ms),
            crate::srt::Timestamp::from_millis(s.end_ms),
            s.keyword_count
        );
    }

    let out_dir = resolve_out_dir(args.out_dir.or_else(|| inputs.config.out_dir.clone()), &args.input);
    let stem = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "captions".to_string());
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join(format!("{stem}.analysis.csv"));
    write_atomic(&csv_path, stats_to_csv(&stats).as_bytes())?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn resolve_out_dir(flag: Option<PathBuf>, input: &Path) -> PathBuf {
    flag.unwrap_or_else(|| {
        let parent = input.parent().unwrap_or_else(|| Path::new("."));
        if parent.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            parent.to_path_buf()
        }
    })
}

/// Write via a temp file in the target directory plus rename, so failures
/// never leave a truncated output file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::config(format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
