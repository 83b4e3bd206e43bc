//! The eight IR transforms.
//!
//! | class | operators | token effect |
//! |---|---|---|
//! | reducing | SDM, TAS, DRO, CFL | output <= input |
//! | reordering | CFO, CAS | output == input |
//! | expanding | SAD-F, CCP | output >= input |
//!
//! Each operator returns a [`Rewrite`]: the new IR plus the ids of the atoms
//! it changed, which the pipeline uses for per-operator span bookkeeping.

mod delimiters;
mod expand;
mod lexicon;
mod phrase;
mod reduce;
mod reorder;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{AtomId, PromptIR};
use crate::tokenizer::TokenizerError;

pub use delimiters::{DelimiterEntry, DelimiterError, DelimiterKind, DelimiterMatch, DelimiterTable, Spacing};
pub use expand::{anchor_cost, ccp, sad_f, DEFAULT_CCP_K, DEFAULT_SAD_BUDGET};
pub use lexicon::{FillerCategory, FillerLexicon, FillerPattern, LexiconError};
pub use reduce::{cfl, dro, sdm, tas};
pub use reorder::{cas, cfo, DEFAULT_BOOKENDS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    #[error("dependency cycle: {}", .cycle.join(" -> "))]
    CyclicDependency { cycle: Vec<String> },
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
}

/// Result of one operator application.
#[derive(Debug, Clone, PartialEq)]
pub struct Rewrite {
    pub ir: PromptIR,
    /// Atoms whose text changed, that were removed, or that moved.
    pub touched: Vec<AtomId>,
}

impl Rewrite {
    pub(crate) fn unchanged(ir: &PromptIR) -> Self {
        Self {
            ir: ir.clone(),
            touched: Vec::new(),
        }
    }
}

/// Token budget `B` for SAD-F; zero makes SAD-F the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SadBudget(pub usize);

impl SadBudget {
    pub fn max_tokens(self) -> usize {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorClass {
    Reducing,
    Reordering,
    Expanding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "SDM")]
    Sdm,
    #[serde(rename = "TAS")]
    Tas,
    #[serde(rename = "DRO")]
    Dro,
    #[serde(rename = "CFL")]
    Cfl,
    #[serde(rename = "CFO")]
    Cfo,
    #[serde(rename = "CAS")]
    Cas,
    #[serde(rename = "SAD-F")]
    SadF,
    #[serde(rename = "CCP")]
    Ccp,
}

impl Operator {
    /// Fixed pipeline order; the derived `Ord` follows it too.
    pub const ORDER: [Operator; 8] = [
        Operator::Sdm,
        Operator::Tas,
        Operator::Dro,
        Operator::Cfl,
        Operator::Cfo,
        Operator::Cas,
        Operator::SadF,
        Operator::Ccp,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Operator::Sdm => "SDM",
            Operator::Tas => "TAS",
            Operator::Dro => "DRO",
            Operator::Cfl => "CFL",
            Operator::Cfo => "CFO",
            Operator::Cas => "CAS",
            Operator::SadF => "SAD-F",
            Operator::Ccp => "CCP",
        }
    }

    pub fn class(self) -> OperatorClass {
        match self {
            Operator::Sdm | Operator::Tas | Operator::Dro | Operator::Cfl => OperatorClass::Reducing,
            Operator::Cfo | Operator::Cas => OperatorClass::Reordering,
            Operator::SadF | Operator::Ccp => OperatorClass::Expanding,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_'))
            .collect::<String>()
            .to_ascii_uppercase();
        Operator::ORDER
            .into_iter()
            .find(|op| op.tag().replace('-', "") == norm)
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}
