//! `tscg`: compile tool catalogs, verify compiled text, summarize token
//! savings and score evaluation transcripts.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | `verify`: structural atoms missing from the compiled text |
//! | 2 | bad input: unreadable file, schema, grammar, transcript or config error |
//! | 3 | `compile --check-bound`: the savings bound does not hold |

mod compile;
mod score;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tscg", version, about = "Deterministic tool-schema compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a tool catalog; the compiled text is the only thing on stdout.
    Compile(Box<compile::CompileArgs>),
    /// Check that compiled text still carries every structural atom of the original.
    Verify(VerifyArgs),
    /// Token counts and savings of a catalog under every profile.
    Stats(compile::StatsArgs),
    /// Accuracy, ratios and significance tests over a JSONL transcript.
    Score(score::ScoreArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Original catalog JSON.
    #[arg(long)]
    original: PathBuf,
    /// Dialect of the original catalog.
    #[arg(long, default_value = "openai-fc")]
    dialect: String,
    /// Compiled text to check.
    #[arg(long)]
    compiled: PathBuf,
}

/// A failed command: the exit code plus a diagnostic for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const MISSING_ATOMS: u8 = 1;
    pub const BAD_INPUT: u8 = 2;
    pub const BOUND_FAILED: u8 = 3;

    pub fn input(message: impl fmt::Display) -> Self {
        Self {
            code: Self::BAD_INPUT,
            message: message.to_string(),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn read_file(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &PathBuf) -> Result<String, Failure> {
    String::from_utf8(read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn verify(args: &VerifyArgs) -> CmdResult {
    let original = tscg_core::parse_catalog(&read_file(&args.original)?, &args.dialect)
        .map_err(|e| Failure::input(format!("{}: {e}", args.original.display())))?;
    let text = read_text(&args.compiled)?;
    let verdict = tscg_core::verify_superset(&original, &text, tscg_core::FillerLexicon::shipped())
        .map_err(|e| Failure::input(format!("{}:{e}", args.compiled.display())))?;
    for atom in &verdict.missing {
        println!("{atom}");
    }
    if !verdict.missing_content_words.is_empty() {
        eprintln!(
            "note: {} description word(s) dropped (advisory)",
            verdict.missing_content_words.len()
        );
    }
    if verdict.ok {
        Ok(())
    } else {
        Err(Failure {
            code: Failure::MISSING_ATOMS,
            message: format!("{} structural atom(s) missing", verdict.missing.len()),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(args) => compile::run(args),
        Command::Verify(args) => verify(args),
        Command::Stats(args) => compile::stats(args),
        Command::Score(args) => score::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tscg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
