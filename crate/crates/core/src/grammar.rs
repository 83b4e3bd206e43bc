//! Text forms of the compiled grammar shared by the emitter and the parser.
//!
//! ```text
//! [ANSWER:json]
//! search_files(query:str path?:str mode:enum[fast|"two words"] limit?:int[1..100])
//! |Search files by content or pattern
//! [RECAP] ...
//! ```

use crate::schema::{JsonType, ParamSpec};

pub(crate) const ANSWER_PREFIX: &str = "[ANSWER:";
pub(crate) const RECAP_PREFIX: &str = "[RECAP]";
pub(crate) const DESC_PREFIX: char = '|';

/// `(a:str b?:int[1..5] m:enum[x|y])`
pub(crate) fn param_block(params: &[ParamSpec]) -> String {
    let mut out = String::from("(");
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&p.name);
        if !p.required {
            out.push('?');
        }
        out.push(':');
        out.push_str(&param_type(p));
    }
    out.push(')');
    out
}

fn param_type(p: &ParamSpec) -> String {
    match (p.json_type, &p.enum_values, &p.numeric_bounds) {
        (JsonType::Enum, Some(values), _) => {
            let body: Vec<String> = values.iter().map(|v| enum_value(v)).collect();
            format!("enum[{}]", body.join("|"))
        }
        (ty, _, Some(b)) if !b.is_empty() => format!(
            "{}[{}..{}]",
            ty.abbrev(),
            b.min.as_deref().unwrap_or(""),
            b.max.as_deref().unwrap_or("")
        ),
        (ty, _, _) => ty.abbrev().to_string(),
    }
}

/// Enum values are bare unless they could be confused with grammar punctuation.
pub(crate) fn enum_value(v: &str) -> String {
    if needs_quoting(v) {
        serde_json::to_string(v).expect("string serializes")
    } else {
        v.to_string()
    }
}

pub(crate) fn needs_quoting(v: &str) -> bool {
    v.is_empty()
        || v.starts_with('"')
        || v.chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '|' | ']' | '[' | '(' | ')' | '\\' | '"'))
}

/// `[ANSWER:type]` from `json`, `ANSWER:json` or `[ANSWER:json]`.
pub(crate) fn answer_line(constraint: &str) -> String {
    let s = constraint.trim();
    let s = s.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(s);
    let ty = s.strip_prefix("ANSWER:").unwrap_or(s);
    let ty = ty.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("{ANSWER_PREFIX}{ty}]")
}
