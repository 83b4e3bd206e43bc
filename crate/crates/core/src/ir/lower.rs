use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use super::{Atom, AtomId, Importance, PromptIR, Role};
use crate::grammar;
use crate::operators::{DelimiterTable, FillerLexicon};
use crate::schema::ToolCatalog;

/// Pass 1: lowers a catalog (and an optional output constraint) to the IR
/// with default importances.
pub fn lower_to_ir(
    cat: &ToolCatalog,
    constraint_text: Option<&str>,
    fillers: &FillerLexicon,
    delimiters: &DelimiterTable,
) -> PromptIR {
    lower_to_ir_with(cat, constraint_text, fillers, delimiters, &Importance::default())
}

/// Each tool becomes a tool-def atom, a param-block atom, and its description
/// segmented into filler-span, delimiter and description atoms. The
/// constraint, if any, follows the tools.
pub fn lower_to_ir_with(
    cat: &ToolCatalog,
    constraint_text: Option<&str>,
    fillers: &FillerLexicon,
    delimiters: &DelimiterTable,
    importance: &Importance,
) -> PromptIR {
    let mut atoms = Vec::new();
    let mut next: AtomId = 0;
    let mut push = |atoms: &mut Vec<Atom>, role: Role, text: String, tool: Option<&str>| {
        let id = next;
        next += 1;
        atoms.push(Atom {
            id,
            role,
            text,
            importance: importance.of(role),
            owner_tool: tool.map(str::to_string),
            origin: None,
        });
        id
    };

    let mut tool_defs: HashMap<String, AtomId> = HashMap::new();
    for tool in cat.tools() {
        let name = Some(tool.name.as_str());
        let def = push(&mut atoms, Role::ToolDef, tool.name.clone(), name);
        tool_defs.insert(tool.name.to_lowercase(), def);
        push(&mut atoms, Role::ParamBlock, grammar::param_block(&tool.params), name);
        let segments = segment_description(&tool.description, fillers, delimiters);
        if segments.is_empty() {
            push(&mut atoms, Role::Description, String::new(), name);
        }
        for (role, range) in segments {
            push(&mut atoms, role, tool.description[range].to_string(), name);
        }
    }
    if let Some(c) = constraint_text {
        push(&mut atoms, Role::Constraint, grammar::answer_line(c), None);
    }

    let mut edges = BTreeSet::new();
    for tool in cat.tools() {
        let to = tool_defs[&tool.name.to_lowercase()];
        for dep in referenced_tools(&tool.description) {
            if let Some(&from) = tool_defs.get(&dep) {
                if from != to {
                    edges.insert((from, to));
                }
            }
        }
    }
    PromptIR::new(atoms, edges.into_iter().collect()).expect("lowering assigns fresh ids")
}

/// Splits a description into role-tagged byte ranges covering it exactly.
fn segment_description(text: &str, fillers: &FillerLexicon, delimiters: &DelimiterTable) -> Vec<(Role, Range<usize>)> {
    let mut out = Vec::new();
    let mut at = 0;
    let plain = |out: &mut Vec<(Role, Range<usize>)>, r: Range<usize>| {
        let mut pos = r.start;
        for m in delimiters.find(&text[r.clone()]) {
            let m = m.range.start + r.start..m.range.end + r.start;
            if m.start > pos {
                out.push((Role::Description, pos..m.start));
            }
            out.push((Role::Delimiter, m.clone()));
            pos = m.end;
        }
        if pos < r.end {
            out.push((Role::Description, pos..r.end));
        }
    };
    for span in fillers.spans(text) {
        if span.start > at {
            plain(&mut out, at..span.start);
        }
        out.push((Role::FillerSpan, span.clone()));
        at = span.end;
    }
    if at < text.len() {
        plain(&mut out, at..text.len());
    }
    out
}

/// Lowercased names following "after" or "requires" in a description.
fn referenced_tools(description: &str) -> Vec<String> {
    let lower = description.to_lowercase();
    let mut out = Vec::new();
    for keyword in ["after ", "requires "] {
        let mut from = 0;
        while let Some(i) = lower[from..].find(keyword) {
            let start = from + i;
            from = start + keyword.len();
            let word_start = start == 0 || !lower[..start].ends_with(|c: char| c.is_alphanumeric() || c == '_');
            if !word_start {
                continue;
            }
            let rest = lower[from..].trim_start_matches('`');
            let name: String = rest
                .chars()
                .take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                .collect();
            let name = name.trim_end_matches('.');
            if !name.is_empty() {
                out.push(name.to_string());
            }
        }
    }
    out
}
