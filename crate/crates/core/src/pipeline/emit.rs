use crate::grammar::{DESC_PREFIX, RECAP_PREFIX};
use crate::ir::{Atom, PromptIR, Role};

/// Pass 10: renders the IR in the compiled grammar.
///
/// Each tool is a head line `name(params)` followed, when it has a
/// description, by a `|description` line. A constraint atom is its own
/// `[ANSWER:type]` line wherever it sits; anchor duplicates and the closure
/// come last as `[RECAP] ...` lines.
pub fn emit(ir: &PromptIR) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut appendix: Vec<String> = Vec::new();
    let mut record: Option<(String, String)> = None;

    fn flush(record: &mut Option<(String, String)>, lines: &mut Vec<String>) {
        if let Some((head, desc)) = record.take() {
            lines.push(head);
            let desc = normalize(&desc);
            if !desc.is_empty() {
                lines.push(format!("{DESC_PREFIX}{desc}"));
            }
        }
    }

    for a in ir.atoms() {
        match a.role {
            Role::Constraint => {
                flush(&mut record, &mut lines);
                lines.push(a.text.clone());
            }
            Role::ToolDef => {
                flush(&mut record, &mut lines);
                record = Some((a.text.clone(), String::new()));
            }
            Role::ParamBlock => match &mut record {
                Some((head, _)) => head.push_str(&a.text),
                None => record = Some((a.text.clone(), String::new())),
            },
            Role::Description | Role::FillerSpan | Role::Delimiter => match &mut record {
                Some((_, desc)) => desc.push_str(&a.text),
                None => lines.push(format!("{DESC_PREFIX}{}", normalize(&a.text))),
            },
            Role::AnchorDup => appendix.push(anchor_line(&a.text)),
            Role::Closure => appendix.push(a.text.clone()),
        }
    }
    flush(&mut record, &mut lines);
    lines.extend(appendix);
    lines.join("\n")
}

pub(crate) fn anchor_line(text: &str) -> String {
    format!("{RECAP_PREFIX} {}", normalize(text))
}

/// The `|description` line for a tool's description atoms, as emit renders it.
pub(crate) fn description_line<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let text: String = atoms
        .into_iter()
        .filter(|a| a.role.is_description_text())
        .map(|a| a.text.as_str())
        .collect();
    format!("{DESC_PREFIX}{}", normalize(&text))
}

/// One tool group's lines exactly as emit renders them.
pub(crate) fn record_lines<'a>(atoms: impl IntoIterator<Item = &'a Atom> + Clone) -> String {
    let head: String = atoms
        .clone()
        .into_iter()
        .filter(|a| matches!(a.role, Role::ToolDef | Role::ParamBlock))
        .map(|a| a.text.as_str())
        .collect();
    let desc = description_line(atoms);
    if desc.len() == DESC_PREFIX.len_utf8() {
        head
    } else {
        format!("{head}\n{desc}")
    }
}

/// `name(params)|description` for one tool group, used in recaps.
pub(crate) fn record_text<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let mut head = String::new();
    let mut desc = String::new();
    for a in atoms {
        match a.role {
            Role::ToolDef | Role::ParamBlock => head.push_str(&a.text),
            r if r.is_description_text() => desc.push_str(&a.text),
            _ => {}
        }
    }
    let desc = normalize(&desc);
    if desc.is_empty() {
        head
    } else {
        format!("{head}{DESC_PREFIX}{desc}")
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::lower_to_ir;
    use crate::operators::{DelimiterTable, FillerLexicon};
    use crate::schema::{Dialect, JsonType, ParamSpec, ToolCatalog, ToolSchema};

    fn emit_catalog(tools: Vec<ToolSchema>, constraint: Option<&str>) -> String {
        let cat = ToolCatalog::new(tools, Dialect::Mcp).unwrap();
        emit(&lower_to_ir(
            &cat,
            constraint,
            FillerLexicon::shipped(),
            DelimiterTable::shipped(),
        ))
    }

    #[test]
    fn enum_params_render_with_pipes() {
        let tool = ToolSchema::new("set", "").with_param(ParamSpec::new("mode", JsonType::Enum).with_enum(["a", "b"]));
        assert_eq!(emit_catalog(vec![tool], None), "set(mode:enum[a|b])");
    }

    #[test]
    fn constraint_line_and_quoting() {
        let tool = ToolSchema::new("pick", "Choose one")
            .with_param(
                ParamSpec::new("v", JsonType::Enum)
                    .with_enum(["two words", "x|y", "ok"])
                    .optional(),
            )
            .with_param(ParamSpec::new("n", JsonType::Number).with_bounds(Some("0.5"), None));
        assert_eq!(
            emit_catalog(vec![tool], Some("json")),
            "pick(v?:enum[\"two words\"|\"x|y\"|ok] n:num[0.5..])\n|Choose one\n[ANSWER:json]"
        );
    }

    #[test]
    fn empty_ir_emits_nothing() {
        assert_eq!(emit(&PromptIR::empty()), "");
    }
}
