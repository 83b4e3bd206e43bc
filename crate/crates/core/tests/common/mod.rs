//! Shared generators for the property tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use tscg_core::corpus::{shipped_fixtures, Fixture};
use tscg_core::{Dialect, JsonType, ParamSpec, ToolCatalog, ToolSchema};

/// Description vocabulary: plain words, shipped fillers, verbose delimiter
/// phrases, symbol delimiters, and text that is awkward for the grammar.
pub const WORDS: &[&str] = &[
    "search",
    "files",
    "returns",
    "user",
    "data",
    "records",
    "by",
    "id",
    "and",
    "path",
    "please",
    "note that",
    "basically",
    "in order to",
    "it is important to note that",
    "corresponds to",
    "as well as",
    "the following items",
    "->",
    "=>",
    "⇒",
    ":",
    "ünïcödé",
    "a|b",
    "[x]",
    "(y)",
    "\"q\"",
    "🙂",
    "after",
    "requires",
];

const TYPES: [JsonType; 6] = [
    JsonType::String,
    JsonType::Integer,
    JsonType::Number,
    JsonType::Boolean,
    JsonType::Array,
    JsonType::Object,
];

fn description() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..12).prop_map(|w| w.join(" "))
}

fn param(j: usize) -> impl Strategy<Value = ParamSpec> {
    let enum_values = prop::collection::btree_set("[a-z]{1,6}|two words|x\\|y", 1..4);
    (
        0..TYPES.len() + 1,
        enum_values,
        prop::option::of(-5i32..5),
        prop::option::of(5i32..100),
        any::<bool>(),
    )
        .prop_map(move |(t, values, min, max, optional)| {
            let name = format!("p{j}");
            let mut p = if t == TYPES.len() {
                ParamSpec::new(name, JsonType::Enum).with_enum(values)
            } else {
                ParamSpec::new(name, TYPES[t])
            };
            if matches!(p.json_type, JsonType::Integer | JsonType::Number) && (min.is_some() || max.is_some()) {
                p = p.with_bounds(
                    min.map(|m| m.to_string()).as_deref(),
                    max.map(|m| m.to_string()).as_deref(),
                );
            }
            if optional {
                p = p.optional();
            }
            p
        })
}

fn tool(i: usize) -> impl Strategy<Value = ToolSchema> {
    (
        prop::sample::select(&["get", "list", "send", "run"][..]),
        description(),
        0usize..5,
    )
        .prop_flat_map(move |(verb, desc, n)| {
            let params: Vec<_> = (0..n).map(param).collect();
            params.prop_map(move |ps| {
                ps.into_iter()
                    .fold(ToolSchema::new(format!("{verb}_{i}"), desc.clone()), |t, p| {
                        t.with_param(p)
                    })
            })
        })
}

pub fn dialect() -> impl Strategy<Value = Dialect> {
    prop::sample::select(Dialect::ALL.to_vec())
}

/// Catalogs of 0..`max_tools` tools with unique names.
pub fn catalog(max_tools: usize) -> impl Strategy<Value = ToolCatalog> {
    (0..=max_tools, dialect()).prop_flat_map(|(n, d)| {
        let tools: Vec<_> = (0..n).map(tool).collect();
        tools.prop_map(move |tools| ToolCatalog::new(tools, d).expect("generated catalog is valid"))
    })
}

pub fn fixtures() -> Vec<Fixture> {
    shipped_fixtures().expect("shipped fixtures load")
}

pub fn names(cat: &ToolCatalog) -> BTreeSet<&str> {
    cat.tools().iter().map(|t| t.name.as_str()).collect()
}
