//! Verbose structural phrases (rewritten by DRO) and delimiter variant sets
//! (chosen between by TAS).

use std::collections::HashMap;
use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::phrase::PhraseMatcher;
use crate::tokenizer::BpeTokenizer;

const SHIPPED_DELIMITERS: &str = include_str!("../../data/delimiters.tsv");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelimiterError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("compact form `{compact}` ({compact_tokens} tokens) is longer than `{verbose}` ({verbose_tokens} tokens)")]
    CompactLonger {
        verbose: String,
        compact: String,
        verbose_tokens: usize,
        compact_tokens: usize,
    },
    #[error("pattern compilation failed: {0}")]
    Regex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelimiterKind {
    /// A multi-word phrase with a compact replacement.
    Phrase,
    /// A symbol with interchangeable spellings.
    Symbol,
}

/// Which surrounding characters a phrase match swallows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    /// Whitespace on both sides: `a corresponds to b` -> `a→b`.
    Tight,
    /// Leading whitespace and a directly following colon: `takes the following items:` -> `takes:`.
    Left,
    /// Nothing: `a as well as b` -> `a & b`.
    Keep,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelimiterEntry {
    pub kind: DelimiterKind,
    pub verbose: String,
    pub compact: String,
    pub spacing: Spacing,
    /// Candidate set for TAS; empty for phrases.
    pub variants: Vec<String>,
}

/// A delimiter occurrence found in text, with spacing already absorbed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelimiterMatch {
    pub range: Range<usize>,
    pub entry: usize,
}

#[derive(Debug, Clone)]
pub struct DelimiterTable {
    entries: Vec<DelimiterEntry>,
    phrases: HashMap<String, usize>,
    symbols: HashMap<String, usize>,
    matcher: Option<PhraseMatcher>,
}

impl PartialEq for DelimiterTable {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl DelimiterTable {
    pub fn new(entries: Vec<DelimiterEntry>) -> Result<Self, DelimiterError> {
        let mut phrases = HashMap::new();
        let mut symbols = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            match e.kind {
                DelimiterKind::Phrase => {
                    phrases.entry(e.verbose.to_lowercase()).or_insert(i);
                }
                DelimiterKind::Symbol => {
                    for v in &e.variants {
                        symbols.entry(v.clone()).or_insert(i);
                    }
                }
            }
        }

        let mut phrase_alts: Vec<&str> = phrases.keys().map(String::as_str).collect();
        phrase_alts.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let mut symbol_alts: Vec<&str> = symbols.keys().map(String::as_str).collect();
        symbol_alts.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));

        let matcher =
            PhraseMatcher::new(&phrase_alts, &symbol_alts).map_err(|e| DelimiterError::Regex(e.to_string()))?;
        Ok(Self {
            entries,
            phrases,
            symbols,
            matcher,
        })
    }

    /// Parses `kind<TAB>verbose<TAB>compact<TAB>spacing<TAB>variants` rows,
    /// variants being space-separated.
    pub fn from_tsv(src: &str) -> Result<Self, DelimiterError> {
        let mut entries = Vec::new();
        for (i, line) in src.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |reason: &str| DelimiterError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 4 {
                return Err(err("expected at least 4 tab-separated columns"));
            }
            let kind = match cols[0] {
                "phrase" => DelimiterKind::Phrase,
                "symbol" => DelimiterKind::Symbol,
                _ => return Err(err("kind must be `phrase` or `symbol`")),
            };
            let spacing = match cols[3] {
                "tight" => Spacing::Tight,
                "left" => Spacing::Left,
                "keep" => Spacing::Keep,
                _ => return Err(err("spacing must be `tight`, `left` or `keep`")),
            };
            let variants: Vec<String> = cols
                .get(4)
                .map(|v| v.split_whitespace().map(str::to_string).collect())
                .unwrap_or_default();
            let (verbose, compact) = (cols[1].trim(), cols[2].trim());
            if verbose.is_empty() || compact.is_empty() {
                return Err(err("empty verbose or compact form"));
            }
            if kind == DelimiterKind::Symbol && variants.first().map(String::as_str) != Some(compact) {
                return Err(err("a symbol row lists its compact form as the first variant"));
            }
            entries.push(DelimiterEntry {
                kind,
                verbose: verbose.to_string(),
                compact: compact.to_string(),
                spacing,
                variants,
            });
        }
        Self::new(entries)
    }

    /// The shipped table, verified against the embedded GPT-2 vocabulary.
    pub fn shipped() -> &'static DelimiterTable {
        static SHIPPED: OnceLock<DelimiterTable> = OnceLock::new();
        SHIPPED.get_or_init(|| {
            let table = Self::from_tsv(SHIPPED_DELIMITERS).expect("shipped table parses");
            table
                .check(crate::tokenizer::gpt2())
                .expect("shipped compact forms are never longer");
            table
        })
    }

    /// Every compact form must tokenize to no more tokens than its phrase.
    pub fn check(&self, t: &BpeTokenizer) -> Result<(), DelimiterError> {
        for e in &self.entries {
            let (v, c) = (t.count_tokens(&e.verbose), t.count_tokens(&e.compact));
            if c > v {
                return Err(DelimiterError::CompactLonger {
                    verbose: e.verbose.clone(),
                    compact: e.compact.clone(),
                    verbose_tokens: v,
                    compact_tokens: c,
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[DelimiterEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The phrase row for an atom text such as `" corresponds to "` or `" the following items:"`.
    pub fn phrase_for(&self, atom_text: &str) -> Option<&DelimiterEntry> {
        let core = atom_text.trim().trim_end_matches(':').trim_end();
        let key = core.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
        self.phrases.get(&key).map(|&i| &self.entries[i])
    }

    /// The symbol row whose candidate set contains `text` exactly.
    pub fn symbol_for(&self, text: &str) -> Option<&DelimiterEntry> {
        self.symbols.get(text).map(|&i| &self.entries[i])
    }

    /// Non-overlapping delimiter occurrences, leftmost-longest, with each
    /// phrase widened per its spacing rule.
    pub fn find(&self, text: &str) -> Vec<DelimiterMatch> {
        let Some(matcher) = &self.matcher else {
            return Vec::new();
        };
        let mut out: Vec<DelimiterMatch> = Vec::new();
        for m in matcher.find_iter(text) {
            let raw = &text[m.clone()];
            let (entry, mut range) = match self.symbols.get(raw) {
                Some(&i) => (i, m.clone()),
                _ => match self.phrase_for(raw) {
                    Some(e) => (self.index_of(e), m.clone()),
                    None => continue,
                },
            };
            let e = &self.entries[entry];
            if e.kind == DelimiterKind::Phrase {
                match e.spacing {
                    Spacing::Tight => {
                        range.start -= trailing_ws(&text[..range.start]);
                        range.end += leading_ws(&text[range.end..]);
                    }
                    Spacing::Left => {
                        range.start -= trailing_ws(&text[..range.start]);
                        if text[range.end..].starts_with(':') {
                            range.end += 1;
                        }
                    }
                    Spacing::Keep => {}
                }
            }
            let floor = out.last().map_or(0, |d| d.range.end);
            range.start = range.start.max(floor);
            out.push(DelimiterMatch { range, entry });
        }
        out
    }

    fn index_of(&self, e: &DelimiterEntry) -> usize {
        self.entries
            .iter()
            .position(|x| std::ptr::eq(x, e))
            .expect("entry belongs to table")
    }
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn trailing_ws(s: &str) -> usize {
    s.len() - s.trim_end().len()
}
