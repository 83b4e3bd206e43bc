use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use tscg_core::{
    check_bound, compile, load_tokenizer, parse_catalog, BpeTokenizer, Operator, PipelineConfig, Profile, SadBudget,
    TokenCounter, ToolCatalog,
};

use crate::{read_file, read_text, CmdResult, Failure};

#[derive(Debug, Args)]
pub struct TokenizerArgs {
    /// `gpt2` (embedded), `heuristic` (chars/4, summaries only) or a path to a merges file.
    #[arg(long, default_value = "gpt2")]
    pub tokenizer: String,
    /// Vocabulary JSON for a merges-file tokenizer; defaults to `vocab.json` next to it.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Catalog JSON file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// openai-fc, anthropic (anthropic-tool-use) or mcp.
    #[arg(long, default_value = "openai-fc")]
    pub dialect: String,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    catalog: CatalogArgs,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    /// conservative, balanced, aggressive or auto.
    #[arg(long)]
    profile: Option<Profile>,
    /// TOML pipeline config; flags given on the command line win over it.
    #[arg(long, env = "TSCG_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    model_family: Option<String>,
    /// Token budget for anchor duplication.
    #[arg(long)]
    sad_budget: Option<usize>,
    /// Items in the closing recap.
    #[arg(long)]
    ccp_k: Option<usize>,
    /// Fragility weight in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Output constraint, emitted as `[ANSWER:<type>]`.
    #[arg(long)]
    answer_type: Option<String>,
    /// Force an operator on (repeatable).
    #[arg(long, value_name = "OP")]
    enable: Vec<Operator>,
    /// Force an operator off (repeatable).
    #[arg(long, value_name = "OP")]
    disable: Vec<Operator>,
    /// Write the compression report JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Fail with exit 3 unless savings meet the reducing-operator bound.
    #[arg(long)]
    check_bound: bool,
    /// Write the compiled text here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    catalog: CatalogArgs,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
}

pub enum Loaded {
    Gpt2,
    Heuristic,
    Custom(Box<BpeTokenizer>),
}

impl Loaded {
    pub fn counter(&self) -> TokenCounter<'_> {
        match self {
            Loaded::Gpt2 => TokenCounter::gpt2(),
            Loaded::Heuristic => TokenCounter::Heuristic,
            Loaded::Custom(t) => TokenCounter::Bpe(t),
        }
    }
}

pub fn load(args: &TokenizerArgs) -> Result<Loaded, Failure> {
    match args.tokenizer.as_str() {
        "gpt2" => Ok(Loaded::Gpt2),
        "heuristic" => Ok(Loaded::Heuristic),
        merges => {
            let merges = PathBuf::from(merges);
            let vocab = args
                .vocab
                .clone()
                .unwrap_or_else(|| merges.parent().unwrap_or(Path::new(".")).join("vocab.json"));
            let t = load_tokenizer(&read_text(&vocab)?, &read_text(&merges)?)
                .map_err(|e| Failure::input(format!("{}: {e}", merges.display())))?;
            Ok(Loaded::Custom(Box::new(t)))
        }
    }
}

fn load_catalog(args: &CatalogArgs) -> Result<ToolCatalog, Failure> {
    parse_catalog(&read_file(&args.input)?, &args.dialect)
        .map_err(|e| Failure::input(format!("{}: {e}", args.input.display())))
}

/// Profile defaults, then the config file, then command-line flags.
fn pipeline_config(args: &CompileArgs) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str::<PipelineConfig>(&read_text(path)?)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => PipelineConfig::default(),
    };
    if let Some(p) = args.profile {
        cfg.profile = p;
    }
    if let Some(f) = &args.model_family {
        cfg.model_family = Some(f.clone());
    }
    if let Some(b) = args.sad_budget {
        cfg.sad_budget = SadBudget(b);
    }
    if let Some(k) = args.ccp_k {
        cfg.ccp_k = k;
    }
    if let Some(a) = args.alpha {
        cfg.fragility_alpha = a;
    }
    if let Some(t) = &args.answer_type {
        cfg.constraint = Some(t.clone());
    }
    for op in &args.enable {
        cfg.disable.remove(op);
        cfg.enable.insert(*op);
    }
    for op in &args.disable {
        cfg.enable.remove(op);
        cfg.disable.insert(*op);
    }
    Ok(cfg)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn run(args: &CompileArgs) -> CmdResult {
    let cat = load_catalog(&args.catalog)?;
    let cfg = pipeline_config(args)?;
    let tokenizer = load(&args.tokenizer)?;
    let (text, report) = compile(&cat, &cfg, tokenizer.counter())
        .map_err(|e| Failure::input(format!("{}: {e}", args.catalog.input.display())))?;

    if let Some(path) = &args.report {
        write(path, &report.to_json_pretty())?;
    }
    match &args.out {
        Some(path) => write(path, &format!("{text}\n"))?,
        None => println!("{text}"),
    }
    eprintln!(
        "{} -> {} tokens ({:.1}% saved, {})",
        report.tokens_before,
        report.tokens_after,
        report.savings * 100.0,
        report.tokenizer
    );

    if args.check_bound {
        let holds = check_bound(&report).map_err(Failure::input)?;
        if !holds {
            return Err(Failure {
                code: Failure::BOUND_FAILED,
                message: format!("savings {:.4} below bound {:.4}", report.savings, report.bound_rhs),
            });
        }
    }
    Ok(())
}

/// Exact counters run every profile as is; the heuristic drops the operators
/// that need exact counts and says so.
pub fn stats(args: &StatsArgs) -> CmdResult {
    let cat = load_catalog(&args.catalog)?;
    let tokenizer = load(&args.tokenizer)?;
    let counter = tokenizer.counter();
    let exact: BTreeSet<Operator> = [Operator::Tas, Operator::SadF].into();
    println!("{} tools, {} dialect", cat.len(), cat.source_dialect());
    println!("{:<13} {:>8} {:>8} {:>8}  ops", "profile", "before", "after", "saved");
    for profile in Profile::ALL {
        let mut cfg = PipelineConfig::for_profile(profile);
        if !counter.is_exact() {
            cfg.disable.extend(exact.iter().copied());
        }
        let (_, r) = compile(&cat, &cfg, counter).map_err(Failure::input)?;
        let ops: Vec<&str> = r.ops_applied.iter().map(|op| op.tag()).collect();
        println!(
            "{:<13} {:>8} {:>8} {:>7.1}%  {}",
            profile.tag(),
            r.tokens_before,
            r.tokens_after,
            r.savings * 100.0,
            ops.join(" ")
        );
    }
    if !counter.is_exact() {
        println!("(heuristic estimate: chars/4, TAS and SAD-F skipped)");
    }
    Ok(())
}
