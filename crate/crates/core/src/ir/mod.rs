//! Prompt IR: an ordered list of role-tagged atoms plus dependency edges.
//!
//! Every operator is a function `PromptIR -> PromptIR`; the emitted text is a
//! pure function of atom order and atom text.

mod fragility;
mod lower;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fragility::{accessibility_proxy, score_fragility, FragilityScore};
pub use lower::{lower_to_ir, lower_to_ir_with};

pub type AtomId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("IR has no atoms")]
    EmptyIR,
    #[error("duplicate atom id {0}")]
    DuplicateAtomId(AtomId),
    #[error("dependency edge references unknown atom {0}")]
    UnknownEdgeEndpoint(AtomId),
    #[error("anchor-dup atom {0} does not reference an existing atom")]
    DanglingAnchor(AtomId),
    #[error("fragility weight must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Constraint,
    ToolDef,
    ParamBlock,
    Description,
    FillerSpan,
    Delimiter,
    Closure,
    AnchorDup,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::Constraint => "constraint",
            Role::ToolDef => "tool-def",
            Role::ParamBlock => "param-block",
            Role::Description => "description",
            Role::FillerSpan => "filler-span",
            Role::Delimiter => "delimiter",
            Role::Closure => "closure",
            Role::AnchorDup => "anchor-dup",
        }
    }

    /// Roles that make up a tool's record and travel with it when tools are reordered.
    pub fn in_tool_group(self) -> bool {
        matches!(
            self,
            Role::ToolDef | Role::ParamBlock | Role::Description | Role::FillerSpan | Role::Delimiter
        )
    }

    /// Roles that belong to the description line of a tool record.
    pub fn is_description_text(self) -> bool {
        matches!(self, Role::Description | Role::FillerSpan | Role::Delimiter)
    }

    /// Appended recap material rather than original prompt content.
    pub fn is_appendix(self) -> bool {
        matches!(self, Role::Closure | Role::AnchorDup)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: AtomId,
    pub role: Role,
    pub text: String,
    pub importance: f64,
    pub owner_tool: Option<String>,
    /// For anchor-dup atoms: the atom whose text is duplicated.
    pub origin: Option<AtomId>,
}

/// Default importance per role; overridable through the pipeline config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Importance {
    pub constraint: f64,
    pub tool_def: f64,
    pub param_block: f64,
    pub description: f64,
    pub delimiter: f64,
    pub filler_span: f64,
    pub closure: f64,
    pub anchor_dup: f64,
}

impl Default for Importance {
    fn default() -> Self {
        Self {
            constraint: 1.0,
            tool_def: 1.0,
            param_block: 0.9,
            description: 0.5,
            delimiter: 0.1,
            filler_span: 0.0,
            closure: 0.0,
            anchor_dup: 0.0,
        }
    }
}

impl Importance {
    pub fn of(&self, role: Role) -> f64 {
        match role {
            Role::Constraint => self.constraint,
            Role::ToolDef => self.tool_def,
            Role::ParamBlock => self.param_block,
            Role::Description => self.description,
            Role::Delimiter => self.delimiter,
            Role::FillerSpan => self.filler_span,
            Role::Closure => self.closure,
            Role::AnchorDup => self.anchor_dup,
        }
    }
}

/// A tool's atoms, by index into [`PromptIR::atoms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolGroup {
    pub tool: String,
    pub tool_def: AtomId,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptIR {
    atoms: Vec<Atom>,
    /// `(from, to)`: the tool-def `from` must precede the tool-def `to`.
    dependency_edges: Vec<(AtomId, AtomId)>,
}

impl PromptIR {
    /// Checks id uniqueness, edge endpoints and anchor origins. Acyclicity is
    /// left to CFO, the only pass that needs a topological order.
    pub fn new(atoms: Vec<Atom>, dependency_edges: Vec<(AtomId, AtomId)>) -> Result<Self, IrError> {
        let mut ids = HashSet::new();
        for a in &atoms {
            if !ids.insert(a.id) {
                return Err(IrError::DuplicateAtomId(a.id));
            }
        }
        for &(from, to) in &dependency_edges {
            for id in [from, to] {
                if !ids.contains(&id) {
                    return Err(IrError::UnknownEdgeEndpoint(id));
                }
            }
        }
        for a in &atoms {
            if a.role == Role::AnchorDup && !a.origin.is_some_and(|o| ids.contains(&o)) {
                return Err(IrError::DanglingAnchor(a.id));
            }
        }
        Ok(Self {
            atoms,
            dependency_edges,
        })
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            dependency_edges: Vec::new(),
        }
    }

    /// Replaces the atom list, dropping edges whose endpoints disappeared.
    pub(crate) fn with_atoms(&self, atoms: Vec<Atom>) -> Self {
        let ids: HashSet<AtomId> = atoms.iter().map(|a| a.id).collect();
        let dependency_edges = self
            .dependency_edges
            .iter()
            .copied()
            .filter(|(a, b)| ids.contains(a) && ids.contains(b))
            .collect();
        Self {
            atoms,
            dependency_edges,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dependency_edges(&self) -> &[(AtomId, AtomId)] {
        &self.dependency_edges
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, id: AtomId) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.id == id)
    }

    pub fn position(&self, id: AtomId) -> Option<usize> {
        self.atoms.iter().position(|a| a.id == id)
    }

    /// The constraint atom, if any.
    pub fn constraint(&self) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.role == Role::Constraint)
    }

    /// A fresh id larger than every id in use.
    pub fn next_id(&self) -> AtomId {
        self.atoms.iter().map(|a| a.id + 1).max().unwrap_or(0)
    }

    /// Tool groups in current order.
    pub fn groups(&self) -> Vec<ToolGroup> {
        let mut order: Vec<String> = Vec::new();
        let mut by_tool: HashMap<&str, ToolGroup> = HashMap::new();
        for (i, a) in self.atoms.iter().enumerate() {
            let (true, Some(tool)) = (a.role.in_tool_group(), a.owner_tool.as_deref()) else {
                continue;
            };
            let g = by_tool.entry(tool).or_insert_with(|| {
                order.push(tool.to_string());
                ToolGroup {
                    tool: tool.to_string(),
                    tool_def: a.id,
                    indices: Vec::new(),
                }
            });
            if a.role == Role::ToolDef {
                g.tool_def = a.id;
            }
            g.indices.push(i);
        }
        order
            .iter()
            .map(|t| by_tool.remove(t.as_str()).expect("grouped"))
            .collect()
    }

    /// Stable JSON dump for golden tests.
    pub fn to_debug_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IR serializes")
    }
}
