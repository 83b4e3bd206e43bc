use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{ANSWER_PREFIX, DESC_PREFIX, RECAP_PREFIX};
use crate::schema::{Dialect, JsonType, ParamSpec, ToolCatalog, ToolSchema, RESERVED_CHARS};

/// Parse failure; `line` and `column` are 1-based, columns count characters.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct GrammarError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Everything a compiled text carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledProgram {
    pub tools: Vec<ToolSchema>,
    /// Type from the `[ANSWER:type]` line.
    pub constraint: Option<String>,
    /// `[RECAP]` lines, without the prefix.
    pub recaps: Vec<String>,
}

/// Inverse of emit on names, parameters, types, optionality, enum values
/// and bounds; descriptions come back as their compiled text.
///
/// Accepts the canonical two-line record, the single-line `name(..)|desc`
/// form, and descriptions wrapped over several `|` lines.
pub fn parse_compiled(text: &str) -> Result<ToolCatalog, GrammarError> {
    let program = parse_compiled_full(text)?;
    ToolCatalog::new(program.tools, Dialect::Mcp).map_err(|e| GrammarError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })
}

pub fn parse_compiled_full(text: &str) -> Result<CompiledProgram, GrammarError> {
    let mut tools: Vec<ToolSchema> = Vec::new();
    let mut constraint = None;
    let mut recaps = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(RECAP_PREFIX) {
            recaps.push(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix(ANSWER_PREFIX) {
            let ty = rest.strip_suffix(']').ok_or_else(|| GrammarError {
                line: line_no,
                column: line.chars().count() + 1,
                message: "expected `]` closing the answer line".into(),
            })?;
            constraint = Some(ty.to_string());
        } else if let Some(rest) = line.strip_prefix(DESC_PREFIX) {
            let tool = tools.last_mut().ok_or_else(|| GrammarError {
                line: line_no,
                column: 1,
                message: "description line before any tool".into(),
            })?;
            append_description(tool, rest);
        } else {
            tools.push(Cursor::new(line, line_no).tool_record()?);
        }
    }
    Ok(CompiledProgram {
        tools,
        constraint,
        recaps,
    })
}

fn append_description(tool: &mut ToolSchema, text: &str) {
    let text = text.trim();
    if text.is_empty() {
        return;
    }
    if !tool.description.is_empty() {
        tool.description.push(' ');
    }
    tool.description.push_str(text);
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    fn error(&self, message: impl fmt::Display) -> GrammarError {
        GrammarError {
            line: self.line,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), GrammarError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(got) => Err(self.error(format!("expected `{c}`, found `{got}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of line"))),
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn identifier(&mut self, what: &str) -> Result<String, GrammarError> {
        let id = self.take_while(|c| !c.is_whitespace() && !c.is_control() && !RESERVED_CHARS.contains(&c));
        if id.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        Ok(id)
    }

    /// `name(params)` optionally followed by `|description`.
    fn tool_record(mut self) -> Result<ToolSchema, GrammarError> {
        let name = self.identifier("a tool name")?;
        self.expect('(')?;
        let mut tool = ToolSchema::new(name, "");
        if self.peek() != Some(')') {
            loop {
                tool.params.push(self.param()?);
                match self.peek() {
                    Some(' ') => self.pos += 1,
                    Some(')') => break,
                    Some(c) => return Err(self.error(format!("expected ` ` or `)`, found `{c}`"))),
                    None => return Err(self.error("unterminated parameter list")),
                }
            }
        }
        self.expect(')')?;
        match self.peek() {
            None => {}
            Some(DESC_PREFIX) => {
                let rest: String = self.chars[self.pos + 1..].iter().collect();
                append_description(&mut tool, &rest);
            }
            Some(c) => return Err(self.error(format!("unexpected `{c}` after parameter list"))),
        }
        tool.description = crate::schema::normalize_text(&tool.description);
        Ok(tool)
    }

    /// `name?:type`
    fn param(&mut self) -> Result<ParamSpec, GrammarError> {
        let name = self.identifier("a parameter name")?;
        let required = if self.peek() == Some('?') {
            self.pos += 1;
            false
        } else {
            true
        };
        self.expect(':')?;
        let start = self.pos;
        let ty = self.take_while(|c| c.is_alphanumeric() || c == '_');
        let Some(json_type) = JsonType::from_abbrev(&ty) else {
            self.pos = start;
            return Err(self.error(format!("unknown type `{ty}`")));
        };
        let mut p = ParamSpec::new(name, json_type);
        p.required = required;
        if json_type == JsonType::Enum {
            p.enum_values = Some(self.enum_values()?);
        } else if self.peek() == Some('[') {
            if !matches!(json_type, JsonType::Integer | JsonType::Number) {
                return Err(self.error(format!("bounds on non-numeric type `{ty}`")));
            }
            let (min, max) = self.bounds()?;
            p = p.with_bounds(min.as_deref(), max.as_deref());
        }
        Ok(p)
    }

    /// `[v1|v2|"quoted value"]`
    fn enum_values(&mut self) -> Result<Vec<String>, GrammarError> {
        self.expect('[')?;
        let mut values = Vec::new();
        loop {
            let value = if self.peek() == Some('"') {
                self.quoted()?
            } else {
                let v = self.take_while(|c| !matches!(c, '|' | ']'));
                if v.is_empty() {
                    return Err(self.error("empty enum value"));
                }
                v
            };
            values.push(value);
            match self.peek() {
                Some('|') => self.pos += 1,
                Some(']') => break,
                _ => return Err(self.error("expected `|` or `]` in enum")),
            }
        }
        self.expect(']')?;
        Ok(values)
    }

    /// A JSON string literal.
    fn quoted(&mut self) -> Result<String, GrammarError> {
        let start = self.pos;
        self.pos += 1;
        loop {
            match self.peek() {
                Some('\\') => self.pos += 2,
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => self.pos += 1,
                None => {
                    self.pos = start;
                    return Err(self.error("unterminated quoted enum value"));
                }
            }
        }
        let literal: String = self.chars[start..self.pos.min(self.chars.len())].iter().collect();
        serde_json::from_str(&literal).map_err(|e| {
            self.pos = start;
            self.error(format!("bad quoted enum value: {e}"))
        })
    }

    /// `[min..max]`, either side optional.
    fn bounds(&mut self) -> Result<(Option<String>, Option<String>), GrammarError> {
        self.expect('[')?;
        let start = self.pos;
        let body = self.take_while(|c| c != ']');
        self.expect(']')?;
        let Some((min, max)) = body.split_once("..") else {
            self.pos = start;
            return Err(self.error(format!("bounds `{body}` lack `..`")));
        };
        let check = |s: &str| -> Result<Option<String>, GrammarError> {
            if s.is_empty() {
                return Ok(None);
            }
            match s.parse::<serde_json::Number>() {
                Ok(_) => Ok(Some(s.to_string())),
                Err(_) => Err(GrammarError {
                    line: self.line,
                    column: start + 1,
                    message: format!("bound `{s}` is not a number"),
                }),
            }
        };
        let (min, max) = (check(min)?, check(max)?);
        if min.is_none() && max.is_none() {
            self.pos = start;
            return Err(self.error("empty bounds"));
        }
        Ok((min, max))
    }
}
