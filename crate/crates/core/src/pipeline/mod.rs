//! The fixed pass sequence: lower → SDM → TAS → DRO → CFL → CFO → CAS →
//! SAD-F → CCP → emit, with profile resolution and token accounting.

pub mod emit;
mod profile;
mod report;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{lower_to_ir_with, score_fragility, AtomId, Importance, IrError, PromptIR, Role};
use crate::operators::{
    self, DelimiterTable, FillerLexicon, OpError, Operator, Rewrite, SadBudget, DEFAULT_BOOKENDS, DEFAULT_CCP_K,
    DEFAULT_SAD_BUDGET,
};
use crate::schema::{sha256_hex, ToolCatalog};
use crate::tokenizer::{self, TokenCounter, TokenizerError};

pub use emit::emit;
pub use profile::{
    lookup_family, model_families, resolve_profile, resolve_profile_with, ModelFamily, Profile, ToolCountThresholds,
};
pub use report::{check_bound, CompressionReport, OpDelta, FORMAT_PASS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("bound check needs SAD-F budget 0 and CCP disabled: {0}")]
    BoundPreconditionViolated(String),
}

pub const DEFAULT_FRAGILITY_ALPHA: f64 = 0.5;

/// Everything that controls one compile. The enabled set is the profile's
/// set for the catalog size, plus `enable`, minus `disable`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub profile: Profile,
    pub enable: BTreeSet<Operator>,
    pub disable: BTreeSet<Operator>,
    pub sad_budget: SadBudget,
    pub fragility_alpha: f64,
    pub ccp_k: usize,
    /// Groups CAS moves to the edges.
    pub bookends: usize,
    pub model_family: Option<String>,
    pub thresholds: ToolCountThresholds,
    /// Output-format constraint, rendered as `[ANSWER:type]`.
    pub constraint: Option<String>,
    pub importance: Importance,
    /// Replaces the shipped filler lexicon.
    #[serde(skip)]
    pub fillers: Option<Arc<FillerLexicon>>,
    /// Replaces the shipped delimiter table.
    #[serde(skip)]
    pub delimiters: Option<Arc<DelimiterTable>>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            profile: Profile::default(),
            enable: BTreeSet::new(),
            disable: BTreeSet::new(),
            sad_budget: SadBudget(DEFAULT_SAD_BUDGET),
            fragility_alpha: DEFAULT_FRAGILITY_ALPHA,
            ccp_k: DEFAULT_CCP_K,
            bookends: DEFAULT_BOOKENDS,
            model_family: None,
            thresholds: ToolCountThresholds::default(),
            constraint: None,
            importance: Importance::default(),
            fillers: None,
            delimiters: None,
        }
    }
}

impl PipelineConfig {
    pub fn for_profile(profile: Profile) -> Self {
        Self {
            profile,
            ..Self::default()
        }
    }

    /// Exactly `ops`, whatever the profile would pick.
    pub fn only(ops: impl IntoIterator<Item = Operator>) -> Self {
        let enable: BTreeSet<Operator> = ops.into_iter().collect();
        Self {
            disable: Operator::ORDER.into_iter().filter(|op| !enable.contains(op)).collect(),
            enable,
            ..Self::default()
        }
    }

    pub fn enabled_ops(&self, tool_count: usize) -> BTreeSet<Operator> {
        let mut ops = resolve_profile_with(self.profile, tool_count, self.model_family.as_deref(), self.thresholds);
        ops.extend(self.enable.iter().copied());
        ops.retain(|op| !self.disable.contains(op));
        ops
    }

    pub fn fillers(&self) -> &FillerLexicon {
        self.fillers.as_deref().unwrap_or_else(|| FillerLexicon::shipped())
    }

    pub fn delimiters(&self) -> &DelimiterTable {
        self.delimiters.as_deref().unwrap_or_else(|| DelimiterTable::shipped())
    }
}

/// Tokens the uncompiled prompt costs: the minified source JSON, plus the
/// constraint as written on its own line.
pub fn baseline_tokens(cat: &ToolCatalog, constraint: Option<&str>, counter: TokenCounter<'_>) -> usize {
    let tools = if cat.is_empty() {
        0
    } else {
        counter.count(cat.source_json())
    };
    let constraint = match constraint {
        Some(c) if cat.is_empty() => counter.count(c),
        Some(c) => counter.count(&format!("\n{c}")),
        None => 0,
    };
    tools + constraint
}

/// Runs the pipeline and returns the compiled text with its report.
pub fn compile(
    cat: &ToolCatalog,
    cfg: &PipelineConfig,
    counter: TokenCounter<'_>,
) -> Result<(String, CompressionReport), PipelineError> {
    let (_, text, report) = compile_ir(cat, cfg, counter)?;
    Ok((text, report))
}

/// As [`compile`], also returning the final IR.
pub fn compile_ir(
    cat: &ToolCatalog,
    cfg: &PipelineConfig,
    counter: TokenCounter<'_>,
) -> Result<(PromptIR, String, CompressionReport), PipelineError> {
    if !(0.0..=1.0).contains(&cfg.fragility_alpha) {
        return Err(PipelineError::InvalidConfig(format!(
            "fragility_alpha {} is outside [0, 1]",
            cfg.fragility_alpha
        )));
    }
    let ops = cfg.enabled_ops(cat.len());
    if ops.contains(&Operator::Tas) {
        counter.require_exact("TAS")?;
    }
    if ops.contains(&Operator::SadF) && !cfg.sad_budget.is_zero() {
        counter.require_exact("SAD-F")?;
    }
    let fillers = cfg.fillers();
    let delimiters = cfg.delimiters();

    let tokens_before = baseline_tokens(cat, cfg.constraint.as_deref(), counter);
    let mut ir = lower_to_ir_with(cat, cfg.constraint.as_deref(), fillers, delimiters, &cfg.importance);
    let mut current = counter.count(&emit(&ir));
    let mut per_op = vec![OpDelta::new(
        FORMAT_PASS,
        true,
        tokens_before,
        current,
        tokens_before,
        tokens_before,
    )];

    for op in Operator::ORDER {
        if !ops.contains(&op) {
            per_op.push(OpDelta::new(op.tag(), false, current, current, 0, tokens_before));
            continue;
        }
        let rw = apply(op, &ir, cfg, counter)?;
        let touched = touched_tokens(&ir, &rw, counter);
        let after = if rw.touched.is_empty() {
            current
        } else {
            counter.count(&emit(&rw.ir))
        };
        per_op.push(OpDelta::new(op.tag(), true, current, after, touched, tokens_before));
        ir = rw.ir;
        current = after;
    }

    let text = emit(&ir);
    let report = CompressionReport {
        bound_rhs: report::bound_rhs(&per_op),
        determinism_hash: sha256_hex(text.as_bytes()),
        ops_applied: Operator::ORDER.into_iter().filter(|op| ops.contains(op)).collect(),
        per_op,
        profile: cfg.profile.tag().to_string(),
        sad_budget: cfg.sad_budget.max_tokens(),
        savings: if tokens_before == 0 {
            0.0
        } else {
            1.0 - report::ratio(current, tokens_before)
        },
        tokenizer: counter_name(counter).to_string(),
        tokens_after: current,
        tokens_before,
        tool_count: cat.len(),
    };
    Ok((ir, text, report))
}

fn apply(
    op: Operator,
    ir: &PromptIR,
    cfg: &PipelineConfig,
    counter: TokenCounter<'_>,
) -> Result<Rewrite, PipelineError> {
    let scores = || -> Result<_, PipelineError> { Ok(score_fragility(ir, cfg.fragility_alpha)?) };
    Ok(match op {
        Operator::Sdm => operators::sdm(ir, cfg.fillers()),
        Operator::Tas => operators::tas(ir, cfg.delimiters(), counter)?,
        Operator::Dro => operators::dro(ir, cfg.delimiters(), counter),
        Operator::Cfl => operators::cfl(ir),
        Operator::Cfo => operators::cfo(ir)?,
        _ if ir.is_empty() => Rewrite::unchanged(ir),
        Operator::Cas => operators::cas(ir, &scores()?, cfg.bookends),
        Operator::SadF => operators::sad_f(ir, &scores()?, cfg.sad_budget, counter)?,
        Operator::Ccp => operators::ccp(ir, &scores()?, cfg.ccp_k),
    })
}

/// Tokens in the emitted records an operator changed: whole tool records for
/// touched group atoms, the line itself for other atoms, and for atoms the
/// operator created, their line in the output.
fn touched_tokens(before: &PromptIR, rw: &Rewrite, counter: TokenCounter<'_>) -> usize {
    if rw.touched.is_empty() {
        return 0;
    }
    let groups = before.groups();
    let group_of: HashMap<usize, usize> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, grp)| grp.indices.iter().map(move |&i| (i, g)))
        .collect();
    let mut records: BTreeSet<usize> = BTreeSet::new();
    let mut singles: BTreeSet<(bool, AtomId)> = BTreeSet::new();
    for &id in &rw.touched {
        match before.position(id) {
            Some(i) => match group_of.get(&i) {
                Some(&g) => {
                    records.insert(g);
                }
                None => {
                    singles.insert((true, id));
                }
            },
            None => {
                singles.insert((false, id));
            }
        }
    }
    let mut total: usize = records
        .into_iter()
        .map(|g| {
            counter.count(&emit::record_lines(
                groups[g].indices.iter().map(|&i| &before.atoms()[i]),
            ))
        })
        .sum();
    for (in_before, id) in singles {
        let ir = if in_before { before } else { &rw.ir };
        if let Some(a) = ir.atom(id) {
            total += counter.count(&match a.role {
                Role::AnchorDup => emit::anchor_line(&a.text),
                _ => a.text.clone(),
            });
        }
    }
    total
}

fn counter_name(counter: TokenCounter<'_>) -> &'static str {
    match counter {
        TokenCounter::Bpe(t) if std::ptr::eq(t, tokenizer::gpt2()) => "gpt2",
        TokenCounter::Bpe(_) => "bpe",
        TokenCounter::Heuristic => "heuristic",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{parse_catalog, Dialect, JsonType, ParamSpec, ToolSchema};

    const FIG2: &str = r#"{"name": "search_files", "description": "Search project files by content or filename pattern", "parameters": {"type": "object", "properties": {"query": {"type": "string", "description": "The search query string"}, "path": {"type": "string", "description": "Optional directory path to search in"}}}}"#;

    fn fig2() -> ToolCatalog {
        parse_catalog(FIG2.as_bytes(), "openai-fc").unwrap()
    }

    #[test]
    fn fig2_balanced() {
        let (text, report) = compile(
            &fig2(),
            &PipelineConfig::for_profile(Profile::Balanced),
            TokenCounter::gpt2(),
        )
        .unwrap();
        assert_eq!(
            text,
            "search_files(query:str path?:str)\n|Search project files by content or filename pattern"
        );
        // frozen from the reference GPT-2 tokenizer
        assert_eq!(report.tokens_before, 57);
        assert_eq!(report.tokens_after, 21);
        assert!(report.savings >= 0.55);
        assert_eq!(
            report.ops_applied,
            [
                Operator::Sdm,
                Operator::Tas,
                Operator::Dro,
                Operator::Cfo,
                Operator::Cas,
                Operator::Ccp
            ]
        );
    }

    #[test]
    fn deltas_telescope() {
        let cfg = PipelineConfig::for_profile(Profile::Aggressive);
        let cfg = PipelineConfig {
            model_family: Some("claude".into()),
            constraint: Some("json".into()),
            ..cfg
        };
        let tools = vec![
            ToolSchema::new("a", "Please note that this returns the weather")
                .with_param(ParamSpec::new("city", JsonType::String)),
            ToolSchema::new("b", "Runs after a; value corresponds to the id"),
            ToolSchema::new("c", "Simply lists items"),
        ];
        let cat = ToolCatalog::new(tools, Dialect::OpenAiFc).unwrap();
        let (text, report) = compile(&cat, &cfg, TokenCounter::gpt2()).unwrap();
        let sum: i64 = report.per_op.iter().map(|d| d.tokens_removed).sum();
        assert_eq!(sum, report.tokens_before as i64 - report.tokens_after as i64);
        assert_eq!(report.per_op.len(), 9);
        assert_eq!(report.tokens_after, TokenCounter::gpt2().count(&text));
        assert!(text.starts_with("[ANSWER:json]\n"), "{text}");
    }

    #[test]
    fn empty_catalog_reports_zero_savings() {
        let (text, report) = compile(
            &ToolCatalog::empty(Dialect::Mcp),
            &PipelineConfig::default(),
            TokenCounter::gpt2(),
        )
        .unwrap();
        assert_eq!(text, "");
        assert_eq!(report.tokens_before, 0);
        assert_eq!(report.savings, 0.0);
    }

    #[test]
    fn all_ops_off_is_pure_format_translation() {
        let cat = fig2();
        let (text, report) = compile(&cat, &PipelineConfig::only([]), TokenCounter::gpt2()).unwrap();
        let ir = crate::ir::lower_to_ir(&cat, None, FillerLexicon::shipped(), DelimiterTable::shipped());
        assert_eq!(text, emit(&ir));
        assert!(report.ops_applied.is_empty());
        assert!(report
            .operator_deltas()
            .all(|(_, d)| d.tokens_removed == 0 && d.touched_tokens == 0));
        assert_eq!(report.bound_rhs, 0.0);
        assert_eq!(check_bound(&report), Ok(true));
    }

    #[test]
    fn bound_preconditions() {
        let cat = fig2();
        let (_, report) = compile(
            &cat,
            &PipelineConfig::for_profile(Profile::Balanced),
            TokenCounter::gpt2(),
        )
        .unwrap();
        assert!(matches!(
            check_bound(&report),
            Err(PipelineError::BoundPreconditionViolated(_))
        ));
        let cfg = PipelineConfig {
            disable: BTreeSet::from([Operator::Ccp]),
            sad_budget: SadBudget(0),
            ..PipelineConfig::for_profile(Profile::Balanced)
        };
        let (_, report) = compile(&cat, &cfg, TokenCounter::gpt2()).unwrap();
        assert_eq!(check_bound(&report), Ok(true));
    }

    #[test]
    fn heuristic_counter_is_refused_when_tas_runs() {
        let err = compile(
            &fig2(),
            &PipelineConfig::for_profile(Profile::Balanced),
            TokenCounter::Heuristic,
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::Tokenizer(_)));
        let ok = compile(
            &fig2(),
            &PipelineConfig::for_profile(Profile::Conservative),
            TokenCounter::Heuristic,
        )
        .unwrap();
        assert_eq!(ok.1.tokenizer, "heuristic");
    }

    #[test]
    fn bad_alpha_is_rejected() {
        let cfg = PipelineConfig {
            fragility_alpha: 1.5,
            ..PipelineConfig::default()
        };
        assert!(matches!(
            compile(&fig2(), &cfg, TokenCounter::gpt2()),
            Err(PipelineError::InvalidConfig(_))
        ));
    }

    #[test]
    fn report_json_fields_are_alphabetical() {
        let (_, report) = compile(&fig2(), &PipelineConfig::default(), TokenCounter::gpt2()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json_pretty()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let op_keys: Vec<&String> = v["per_op"][0].as_object().unwrap().keys().collect();
        let mut sorted = op_keys.clone();
        sorted.sort();
        assert_eq!(op_keys, sorted);
    }
}
