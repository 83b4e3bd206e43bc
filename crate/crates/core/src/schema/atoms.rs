use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ToolCatalog;
use crate::operators::FillerLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomKind {
    ToolName,
    ParamName,
    ParamType,
    RequiredFlag,
    EnumValue,
    NumericBound,
    DescriptionContentWord,
}

impl AtomKind {
    pub fn tag(self) -> &'static str {
        match self {
            AtomKind::ToolName => "tool-name",
            AtomKind::ParamName => "param-name",
            AtomKind::ParamType => "param-type",
            AtomKind::RequiredFlag => "required-flag",
            AtomKind::EnumValue => "enum-value",
            AtomKind::NumericBound => "numeric-bound",
            AtomKind::DescriptionContentWord => "description-content-word",
        }
    }

    /// Everything except description words, which only get an advisory check.
    pub fn is_structural(self) -> bool {
        self != AtomKind::DescriptionContentWord
    }
}

/// One fact a compiled schema has to keep.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemanticAtom {
    pub kind: AtomKind,
    pub tool: String,
    pub param: Option<String>,
    pub value: String,
}

impl SemanticAtom {
    fn new(kind: AtomKind, tool: &str, param: Option<&str>, value: impl Into<String>) -> Self {
        Self {
            kind,
            tool: tool.to_string(),
            param: param.map(str::to_string),
            value: value.into(),
        }
    }
}

impl fmt::Display for SemanticAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            Some(p) => write!(f, "({}, {}, {}, {})", self.kind.tag(), self.tool, p, self.value),
            None => write!(f, "({}, {}, {})", self.kind.tag(), self.tool, self.value),
        }
    }
}

pub type SemanticAtomSet = BTreeSet<SemanticAtom>;

/// Lowercased content words of `text` with every filler match removed first.
pub fn content_words(text: &str, fillers: &FillerLexicon) -> BTreeSet<String> {
    fillers
        .strip(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn semantic_atoms(cat: &ToolCatalog, fillers: &FillerLexicon) -> SemanticAtomSet {
    let mut set = SemanticAtomSet::new();
    for tool in cat.tools() {
        let t = tool.name.as_str();
        set.insert(SemanticAtom::new(AtomKind::ToolName, t, None, t));
        for p in &tool.params {
            let name = Some(p.name.as_str());
            set.insert(SemanticAtom::new(AtomKind::ParamName, t, name, p.name.as_str()));
            set.insert(SemanticAtom::new(AtomKind::ParamType, t, name, p.json_type.name()));
            set.insert(SemanticAtom::new(
                AtomKind::RequiredFlag,
                t,
                name,
                if p.required { "required" } else { "optional" },
            ));
            for v in p.enum_values.iter().flatten() {
                set.insert(SemanticAtom::new(AtomKind::EnumValue, t, name, v.as_str()));
            }
            if let Some(b) = &p.numeric_bounds {
                if let Some(min) = &b.min {
                    set.insert(SemanticAtom::new(AtomKind::NumericBound, t, name, format!("min={min}")));
                }
                if let Some(max) = &b.max {
                    set.insert(SemanticAtom::new(AtomKind::NumericBound, t, name, format!("max={max}")));
                }
            }
        }
        for w in content_words(&tool.description, fillers) {
            set.insert(SemanticAtom::new(AtomKind::DescriptionContentWord, t, None, w));
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{FillerCategory, FillerPattern};
    use crate::schema::{Dialect, JsonType, ParamSpec, ToolSchema};

    fn fillers(words: &[&str]) -> FillerLexicon {
        FillerLexicon::new(
            words
                .iter()
                .map(|w| FillerPattern {
                    text: w.to_string(),
                    category: FillerCategory::Politeness,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn filler_words_are_not_content() {
        let words = content_words("Please kindly search files", &fillers(&["please", "kindly"]));
        assert_eq!(words, BTreeSet::from(["search".to_string(), "files".to_string()]));
    }

    #[test]
    fn empty_catalog_has_no_atoms() {
        assert!(semantic_atoms(&ToolCatalog::empty(Dialect::Mcp), FillerLexicon::shipped()).is_empty());
    }

    #[test]
    fn atoms_cover_structure() {
        let tool = ToolSchema::new("search_files", "Search project files")
            .with_param(ParamSpec::new("query", JsonType::String))
            .with_param(ParamSpec::new("mode", JsonType::Enum).with_enum(["a", "b"]).optional())
            .with_param(ParamSpec::new("limit", JsonType::Integer).with_bounds(Some("1"), None));
        let cat = ToolCatalog::new(vec![tool], Dialect::OpenAiFc).unwrap();
        let atoms = semantic_atoms(&cat, FillerLexicon::shipped());
        let has = |kind, param: Option<&str>, value: &str| {
            atoms.contains(&SemanticAtom::new(kind, "search_files", param, value))
        };
        assert!(has(AtomKind::ToolName, None, "search_files"));
        assert!(has(AtomKind::ParamName, Some("query"), "query"));
        assert!(has(AtomKind::ParamType, Some("query"), "string"));
        assert!(has(AtomKind::RequiredFlag, Some("mode"), "optional"));
        assert!(has(AtomKind::EnumValue, Some("mode"), "b"));
        assert!(has(AtomKind::NumericBound, Some("limit"), "min=1"));
        assert!(has(AtomKind::DescriptionContentWord, None, "project"));
        // 1 tool + 3 params * 3 + 2 enum + 1 bound + 3 words
        assert_eq!(atoms.len(), 16);
    }
}
