//! Deterministic tool-schema compiler.
//!
//! Parses JSON tool catalogs (OpenAI function calling, Anthropic tool use,
//! MCP), lowers them to a role-tagged IR, runs eight composable operators in a
//! fixed order, and emits a compact one-record-per-tool text grammar. The
//! output can be parsed back and checked for semantic preservation, and a
//! small statistics toolkit scores recorded evaluation transcripts.
//!
//! ```
//! use tscg_core::{compile, parse_catalog, PipelineConfig, Profile, TokenCounter};
//!
//! let json = br#"[{"name":"ping","description":"Check that a host is up",
//!   "parameters":{"type":"object","properties":{"host":{"type":"string"}},"required":["host"]}}]"#;
//! let cat = parse_catalog(json, "openai-fc").unwrap();
//! let cfg = PipelineConfig::for_profile(Profile::Balanced);
//! let (text, report) = compile(&cat, &cfg, TokenCounter::gpt2()).unwrap();
//! assert!(text.starts_with("ping(host:str)"));
//! assert!(report.tokens_after < report.tokens_before);
//! ```

pub mod corpus;
pub mod equivalence;
mod grammar;
pub mod ir;
pub mod metrics;
pub mod operators;
pub mod pipeline;
pub mod schema;
pub mod tokenizer;

pub use equivalence::{parse_compiled, verify_superset, GrammarError, Verdict};
pub use ir::{lower_to_ir, score_fragility, Atom, AtomId, FragilityScore, IrError, PromptIR, Role};
pub use operators::{DelimiterTable, FillerLexicon, OpError, Operator, SadBudget};
pub use pipeline::{
    check_bound, compile, emit, resolve_profile, CompressionReport, OpDelta, PipelineConfig, PipelineError, Profile,
};
pub use schema::{
    parse_catalog, semantic_atoms, AtomKind, Dialect, JsonType, ParamSpec, SchemaError, SemanticAtom, SemanticAtomSet,
    ToolCatalog, ToolSchema,
};
pub use tokenizer::{find_nonmonotonic_witness, load_tokenizer, BpeTokenizer, TokenCounter, TokenizerError};
