//! Provider-neutral tool catalog.
//!
//! Catalogs arrive in one of three wire dialects (OpenAI function calling,
//! Anthropic tool use, MCP `tools/list`). [`parse_catalog`] lowers all of
//! them into the same [`ToolCatalog`], and [`semantic_atoms`] extracts the
//! set of facts every later transform has to preserve.

mod atoms;
mod dialect;
mod render;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub use atoms::{content_words, semantic_atoms, AtomKind, SemanticAtom, SemanticAtomSet};
pub use dialect::{parse_catalog, parse_catalog_as};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("unknown dialect `{0}` (expected openai-fc, anthropic-tool-use or mcp)")]
    UnknownDialect(String),
    #[error("duplicate tool name `{0}`")]
    DuplicateToolName(String),
    #[error("duplicate parameter `{param}` in tool `{tool}`")]
    DuplicateParamName { tool: String, param: String },
    #[error("unsupported schema feature `{feature}` at {path}")]
    UnsupportedSchemaFeature { path: String, feature: String },
    #[error("invalid identifier `{name}` at {path}: {reason}")]
    InvalidIdentifier {
        path: String,
        name: String,
        reason: &'static str,
    },
    #[error("invalid schema at {path}: {reason}")]
    Invalid { path: String, reason: String },
}

/// Wire format a catalog was read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dialect {
    #[serde(rename = "openai-fc")]
    OpenAiFc,
    #[serde(rename = "anthropic-tool-use")]
    AnthropicToolUse,
    #[serde(rename = "mcp")]
    Mcp,
}

impl Dialect {
    pub const ALL: [Dialect; 3] = [Dialect::OpenAiFc, Dialect::AnthropicToolUse, Dialect::Mcp];

    pub fn tag(self) -> &'static str {
        match self {
            Dialect::OpenAiFc => "openai-fc",
            Dialect::AnthropicToolUse => "anthropic-tool-use",
            Dialect::Mcp => "mcp",
        }
    }

    /// Key under which the parameter schema lives in a tool object.
    pub(crate) fn schema_key(self) -> &'static str {
        match self {
            Dialect::OpenAiFc => "parameters",
            Dialect::AnthropicToolUse => "input_schema",
            Dialect::Mcp => "inputSchema",
        }
    }
}

impl FromStr for Dialect {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "openai-fc" | "openai" => Ok(Dialect::OpenAiFc),
            "anthropic-tool-use" | "anthropic" => Ok(Dialect::AnthropicToolUse),
            "mcp" => Ok(Dialect::Mcp),
            other => Err(SchemaError::UnknownDialect(other.to_string())),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parameter type as seen by the emit grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsonType {
    String,
    Integer,
    Number,
    Boolean,
    Array,
    Object,
    Enum,
}

impl JsonType {
    pub fn name(self) -> &'static str {
        match self {
            JsonType::String => "string",
            JsonType::Integer => "integer",
            JsonType::Number => "number",
            JsonType::Boolean => "boolean",
            JsonType::Array => "array",
            JsonType::Object => "object",
            JsonType::Enum => "enum",
        }
    }

    /// Short form used in compiled output.
    pub fn abbrev(self) -> &'static str {
        match self {
            JsonType::String => "str",
            JsonType::Integer => "int",
            JsonType::Number => "num",
            JsonType::Boolean => "bool",
            JsonType::Array => "arr",
            JsonType::Object => "obj",
            JsonType::Enum => "enum",
        }
    }

    pub fn from_abbrev(s: &str) -> Option<Self> {
        Some(match s {
            "str" => JsonType::String,
            "int" => JsonType::Integer,
            "num" => JsonType::Number,
            "bool" => JsonType::Boolean,
            "arr" => JsonType::Array,
            "obj" => JsonType::Object,
            "enum" => JsonType::Enum,
            _ => return None,
        })
    }

    pub(crate) fn from_schema_name(s: &str) -> Option<Self> {
        Some(match s {
            "string" => JsonType::String,
            "integer" => JsonType::Integer,
            "number" => JsonType::Number,
            "boolean" => JsonType::Boolean,
            "array" => JsonType::Array,
            "object" => JsonType::Object,
            _ => return None,
        })
    }
}

/// Inclusive numeric bounds, each stored in canonical JSON number form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumericBounds {
    pub min: Option<String>,
    pub max: Option<String>,
}

impl NumericBounds {
    pub fn is_empty(&self) -> bool {
        self.min.is_none() && self.max.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub json_type: JsonType,
    pub required: bool,
    /// Non-empty exactly when `json_type` is [`JsonType::Enum`].
    pub enum_values: Option<Vec<String>>,
    pub description: String,
    pub numeric_bounds: Option<NumericBounds>,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, json_type: JsonType) -> Self {
        Self {
            name: name.into(),
            json_type,
            required: true,
            enum_values: None,
            description: String::new(),
            numeric_bounds: None,
        }
    }

    pub fn optional(mut self) -> Self {
        self.required = false;
        self
    }

    pub fn with_enum<I, S>(mut self, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.json_type = JsonType::Enum;
        self.enum_values = Some(values.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_bounds(mut self, min: Option<&str>, max: Option<&str>) -> Self {
        let bounds = NumericBounds {
            min: min.map(str::to_string),
            max: max.map(str::to_string),
        };
        self.numeric_bounds = (!bounds.is_empty()).then_some(bounds);
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = normalize_text(&text.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    pub description: String,
    pub params: Vec<ParamSpec>,
}

impl ToolSchema {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: normalize_text(&description.into()),
            params: Vec::new(),
        }
    }

    pub fn with_param(mut self, param: ParamSpec) -> Self {
        self.params.push(param);
        self
    }
}

/// An ordered, validated set of tool schemas.
///
/// Tool order is the source order; nothing downstream mutates a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolCatalog {
    tools: Vec<ToolSchema>,
    source_dialect: Dialect,
    source_bytes_hash: String,
    /// Minified source JSON; the baseline every savings figure is measured against.
    source_json: String,
}

impl ToolCatalog {
    /// Builds a catalog from in-memory tools, synthesizing the source JSON in `dialect`.
    pub fn new(tools: Vec<ToolSchema>, dialect: Dialect) -> Result<Self, SchemaError> {
        validate_tools(&tools)?;
        let source_json = render::to_json(&tools, dialect).to_string();
        Ok(Self::from_parts(
            tools,
            dialect,
            source_json.as_bytes(),
            source_json.clone(),
        ))
    }

    pub(crate) fn from_parts(
        tools: Vec<ToolSchema>,
        source_dialect: Dialect,
        source_bytes: &[u8],
        source_json: String,
    ) -> Self {
        Self {
            tools,
            source_dialect,
            source_bytes_hash: sha256_hex(source_bytes),
            source_json,
        }
    }

    pub fn empty(dialect: Dialect) -> Self {
        Self::new(Vec::new(), dialect).expect("empty catalog is valid")
    }

    pub fn tools(&self) -> &[ToolSchema] {
        &self.tools
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn tool(&self, name: &str) -> Option<&ToolSchema> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn source_dialect(&self) -> Dialect {
        self.source_dialect
    }

    pub fn source_bytes_hash(&self) -> &str {
        &self.source_bytes_hash
    }

    pub fn source_json(&self) -> &str {
        &self.source_json
    }

    /// Renders the catalog in the given dialect's wire format.
    pub fn to_json(&self, dialect: Dialect) -> serde_json::Value {
        render::to_json(&self.tools, dialect)
    }
}

pub(crate) fn validate_tools(tools: &[ToolSchema]) -> Result<(), SchemaError> {
    let mut seen = HashSet::new();
    for (i, tool) in tools.iter().enumerate() {
        check_identifier(&tool.name, &format!("$.tools[{i}].name"))?;
        if !seen.insert(tool.name.as_str()) {
            return Err(SchemaError::DuplicateToolName(tool.name.clone()));
        }
        let mut params = HashSet::new();
        for (j, p) in tool.params.iter().enumerate() {
            check_identifier(&p.name, &format!("$.tools[{i}].params[{j}]"))?;
            if !params.insert(p.name.as_str()) {
                return Err(SchemaError::DuplicateParamName {
                    tool: tool.name.clone(),
                    param: p.name.clone(),
                });
            }
            let has_values = p.enum_values.as_ref().is_some_and(|v| !v.is_empty());
            if has_values != (p.json_type == JsonType::Enum) {
                return Err(SchemaError::Invalid {
                    path: format!("$.tools[{i}].params[{j}]"),
                    reason: "enum values must be present exactly for enum parameters".into(),
                });
            }
        }
    }
    Ok(())
}

/// Characters the compiled grammar reserves; identifiers may not contain them.
pub(crate) const RESERVED_CHARS: &[char] = &['(', ')', '[', ']', '|', ':', '?', '"'];

pub(crate) fn check_identifier(name: &str, path: &str) -> Result<(), SchemaError> {
    let fail = |reason| {
        Err(SchemaError::InvalidIdentifier {
            path: path.to_string(),
            name: name.to_string(),
            reason,
        })
    };
    if name.is_empty() {
        return fail("empty");
    }
    if name.chars().any(char::is_whitespace) {
        return fail("contains whitespace");
    }
    if name.chars().any(|c| c.is_control() || RESERVED_CHARS.contains(&c)) {
        return fail("contains a reserved character");
    }
    Ok(())
}

/// NFC-normalizes and collapses every whitespace run to a single space.
pub fn normalize_text(s: &str) -> String {
    let nfc: String = s.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dialect_tags_round_trip() {
        for d in Dialect::ALL {
            assert_eq!(d.tag().parse::<Dialect>().unwrap(), d);
        }
        assert_eq!("anthropic".parse::<Dialect>().unwrap(), Dialect::AnthropicToolUse);
        assert!(matches!(
            "langchain".parse::<Dialect>(),
            Err(SchemaError::UnknownDialect(_))
        ));
    }

    #[test]
    fn normalization_is_nfc_and_single_spaced() {
        assert_eq!(normalize_text("  a\t\nb   c "), "a b c");
        // e + combining acute composes to U+00E9
        assert_eq!(normalize_text("cafe\u{301}"), "caf\u{e9}");
    }

    #[test]
    fn identifiers_reject_whitespace_and_reserved() {
        assert!(check_identifier("search_files", "$").is_ok());
        assert!(check_identifier("config.depth", "$").is_ok());
        assert!(check_identifier("", "$").is_err());
        assert!(check_identifier("two words", "$").is_err());
        assert!(check_identifier("f(x)", "$").is_err());
    }

    #[test]
    fn catalog_rejects_duplicate_tools() {
        let tools = vec![ToolSchema::new("run", ""), ToolSchema::new("run", "")];
        assert_eq!(
            ToolCatalog::new(tools, Dialect::Mcp),
            Err(SchemaError::DuplicateToolName("run".into()))
        );
    }

    #[test]
    fn enum_invariant_enforced() {
        let mut p = ParamSpec::new("mode", JsonType::Enum);
        p.enum_values = Some(vec![]);
        let tools = vec![ToolSchema::new("t", "").with_param(p)];
        assert!(matches!(
            ToolCatalog::new(tools, Dialect::Mcp),
            Err(SchemaError::Invalid { .. })
        ));
    }
}
