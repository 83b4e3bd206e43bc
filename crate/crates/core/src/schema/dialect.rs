use serde_json::{Map, Value};

use super::{
    check_identifier, normalize_text, validate_tools, Dialect, JsonType, NumericBounds, ParamSpec, SchemaError,
    ToolCatalog, ToolSchema,
};

/// Parses `bytes` as a tool catalog in the dialect named by `dialect_tag`.
pub fn parse_catalog(bytes: &[u8], dialect_tag: &str) -> Result<ToolCatalog, SchemaError> {
    parse_catalog_as(bytes, dialect_tag.parse()?)
}

pub fn parse_catalog_as(bytes: &[u8], dialect: Dialect) -> Result<ToolCatalog, SchemaError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| SchemaError::MalformedJson(e.to_string()))?;
    let source_json = root.to_string();

    let mut tools = Vec::new();
    for (path, item) in tool_items(&root)? {
        tools.push(parse_tool(item, &path, dialect)?);
    }
    validate_tools(&tools)?;
    Ok(ToolCatalog::from_parts(tools, dialect, bytes, source_json))
}

/// Locates the tool objects under any of the envelopes the SDKs produce.
fn tool_items(root: &Value) -> Result<Vec<(String, &Value)>, SchemaError> {
    fn list<'a>(base: &str, items: &'a [Value]) -> Vec<(String, &'a Value)> {
        items
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("{base}[{i}]"), v))
            .collect()
    }

    match root {
        Value::Array(items) => Ok(list("$", items)),
        Value::Object(obj) => {
            if let Some(tools) = obj.get("tools") {
                let items = tools
                    .as_array()
                    .ok_or_else(|| invalid("$.tools", "expected an array"))?;
                return Ok(list("$.tools", items));
            }
            if let Some(Value::Array(items)) = obj.get("functions") {
                return Ok(list("$.functions", items));
            }
            if let Some(Value::Object(result)) = obj.get("result") {
                if let Some(Value::Array(items)) = result.get("tools") {
                    return Ok(list("$.result.tools", items));
                }
            }
            if obj.contains_key("name") || obj.contains_key("function") {
                return Ok(vec![("$".to_string(), root)]);
            }
            Err(invalid("$", "no tool list found"))
        }
        _ => Err(invalid("$", "expected an object or array")),
    }
}

fn parse_tool(item: &Value, path: &str, dialect: Dialect) -> Result<ToolSchema, SchemaError> {
    let mut obj = item
        .as_object()
        .ok_or_else(|| invalid(path, "tool must be an object"))?;
    let mut path = path.to_string();

    // OpenAI wraps definitions as {"type": "function", "function": {...}}
    if dialect == Dialect::OpenAiFc {
        if let Some(Value::Object(inner)) = obj.get("function") {
            obj = inner;
            path.push_str(".function");
        }
    }

    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(invalid(&format!("{path}.name"), "name must be a string")),
        None => return Err(invalid(&path, "missing `name`")),
    };
    check_identifier(&name, &format!("{path}.name"))?;

    let description = match obj.get("description") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(invalid(&format!("{path}.description"), "must be a string")),
    };

    let key = dialect.schema_key();
    let (params, extras) = match obj.get(key) {
        Some(schema) => parse_root_schema(schema, &format!("{path}.{key}"))?,
        None => {
            let foreign = Dialect::ALL
                .iter()
                .map(|d| d.schema_key())
                .find(|k| *k != key && obj.contains_key(*k));
            if let Some(foreign) = foreign {
                return Err(SchemaError::UnsupportedSchemaFeature {
                    path: format!("{path}.{foreign}"),
                    feature: format!("`{foreign}` in a {dialect} catalog (expected `{key}`)"),
                });
            }
            (Vec::new(), Vec::new())
        }
    };

    let mut tool = ToolSchema::new(name, description);
    tool.description = with_suffix(&tool.description, &extras);
    tool.params = params;
    Ok(tool)
}

const COMPOSITION: [&str; 5] = ["oneOf", "anyOf", "allOf", "not", "$ref"];

fn parse_root_schema(schema: &Value, path: &str) -> Result<(Vec<ParamSpec>, Vec<String>), SchemaError> {
    let obj = schema
        .as_object()
        .ok_or_else(|| invalid(path, "parameter schema must be an object"))?;
    reject_composition(obj, path)?;
    if let Some(t) = obj.get("type") {
        if t.as_str() != Some("object") {
            return Err(SchemaError::UnsupportedSchemaFeature {
                path: format!("{path}.type"),
                feature: format!("root type {t}"),
            });
        }
    }

    let required = required_list(obj, path)?;
    let mut extras = Vec::new();
    for (k, v) in obj {
        if !matches!(k.as_str(), "type" | "properties" | "required") {
            extras.push(keyword_text(k, v));
        }
    }

    let mut params = Vec::new();
    if let Some(props) = obj.get("properties") {
        let props = props
            .as_object()
            .ok_or_else(|| invalid(&format!("{path}.properties"), "expected an object"))?;
        for (name, prop) in props {
            let prop_path = format!("{path}.properties.{name}");
            params.extend(parse_property(name, prop, &prop_path, required.as_deref(), true, true)?);
        }
    }
    Ok((params, extras))
}

fn parse_property(
    name: &str,
    prop: &Value,
    path: &str,
    required_in: Option<&[String]>,
    parent_required: bool,
    allow_flatten: bool,
) -> Result<Vec<ParamSpec>, SchemaError> {
    check_identifier(name, path)?;
    let raw = prop
        .as_object()
        .ok_or_else(|| invalid(path, "property schema must be an object"))?;
    let obj = unwrap_nullable(raw, path)?;
    let obj = &obj;

    let description = match obj.get("description") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => normalize_text(s),
        Some(_) => return Err(invalid(&format!("{path}.description"), "must be a string")),
    };
    let required = parent_required
        && match required_in {
            Some(list) => list.iter().any(|r| r == name),
            None => !starts_with_optional(&description),
        };

    let (json_type, enum_values) = match obj.get("enum") {
        Some(Value::Array(values)) if !values.is_empty() => {
            let values = values
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            (JsonType::Enum, Some(values))
        }
        Some(_) => {
            return Err(SchemaError::UnsupportedSchemaFeature {
                path: format!("{path}.enum"),
                feature: "empty or non-array enum".into(),
            })
        }
        None => (schema_type(obj, path)?, None),
    };

    let nested = obj
        .get("properties")
        .and_then(Value::as_object)
        .filter(|p| !p.is_empty());
    let flatten = allow_flatten && json_type == JsonType::Object && nested.is_some();

    let mut known: Vec<&str> = vec!["type", "description", "enum", "minimum", "maximum"];
    if flatten {
        known.extend(["properties", "required"]);
    }
    let extras: Vec<String> = obj
        .iter()
        .filter(|(k, _)| !known.contains(&k.as_str()))
        .map(|(k, v)| keyword_text(k, v))
        .collect();

    if flatten {
        // One level of nesting becomes dotted names; the parent's own text rides on the first child.
        let child_required = required_list(obj, path)?;
        let mut out = Vec::new();
        for (child, schema) in nested.into_iter().flatten() {
            let child_path = format!("{path}.properties.{child}");
            let dotted = format!("{name}.{child}");
            let mut specs = parse_property(child, schema, &child_path, child_required.as_deref(), required, false)?;
            for spec in &mut specs {
                spec.name = dotted.clone();
            }
            out.extend(specs);
        }
        if let Some(first) = out.first_mut() {
            let mut parent_text = extras;
            if !description.is_empty() {
                parent_text.insert(0, format!("[{name}: {description}]"));
            }
            first.description = with_suffix(&first.description, &parent_text);
        }
        return Ok(out);
    }

    let bounds = NumericBounds {
        min: bound(obj, "minimum", path)?,
        max: bound(obj, "maximum", path)?,
    };

    Ok(vec![ParamSpec {
        name: name.to_string(),
        json_type,
        required,
        enum_values,
        description: with_suffix(&description, &extras),
        numeric_bounds: (!bounds.is_empty()).then_some(bounds),
    }])
}

fn required_list(obj: &Map<String, Value>, path: &str) -> Result<Option<Vec<String>>, SchemaError> {
    match obj.get("required") {
        None => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| invalid(&format!("{path}.required"), "entries must be strings"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(_) => Err(invalid(&format!("{path}.required"), "expected an array")),
    }
}

fn reject_composition(obj: &Map<String, Value>, path: &str) -> Result<(), SchemaError> {
    match COMPOSITION.iter().find(|k| obj.contains_key(**k)) {
        Some(k) => Err(SchemaError::UnsupportedSchemaFeature {
            path: format!("{path}.{k}"),
            feature: (*k).to_string(),
        }),
        None => Ok(()),
    }
}

/// `anyOf`/`oneOf` of one schema plus `{"type": "null"}` is a nullable field; anything else is rejected.
fn unwrap_nullable(obj: &Map<String, Value>, path: &str) -> Result<Map<String, Value>, SchemaError> {
    for key in ["anyOf", "oneOf"] {
        let Some(branches) = obj.get(key) else { continue };
        let branches = branches.as_array().map(Vec::as_slice).unwrap_or_default();
        let non_null: Vec<&Value> = branches
            .iter()
            .filter(|b| b.get("type").and_then(Value::as_str) != Some("null"))
            .collect();
        if branches.len() != 2 || non_null.len() != 1 || !non_null[0].is_object() {
            return Err(SchemaError::UnsupportedSchemaFeature {
                path: format!("{path}.{key}"),
                feature: key.to_string(),
            });
        }
        let mut merged = non_null[0].as_object().cloned().unwrap_or_default();
        for (k, v) in obj {
            if k != key {
                merged.insert(k.clone(), v.clone());
            }
        }
        return Ok(merged);
    }
    reject_composition(obj, path)?;
    Ok(obj.clone())
}

fn schema_type(obj: &Map<String, Value>, path: &str) -> Result<JsonType, SchemaError> {
    let unsupported = |feature: String| SchemaError::UnsupportedSchemaFeature {
        path: format!("{path}.type"),
        feature,
    };
    match obj.get("type") {
        Some(Value::String(t)) => JsonType::from_schema_name(t).ok_or_else(|| unsupported(format!("type `{t}`"))),
        Some(Value::Array(types)) => {
            let names: Vec<&str> = types
                .iter()
                .filter_map(Value::as_str)
                .filter(|t| *t != "null")
                .collect();
            match names.as_slice() {
                [single] => JsonType::from_schema_name(single).ok_or_else(|| unsupported(format!("type `{single}`"))),
                _ => Err(unsupported("union type".into())),
            }
        }
        Some(other) => Err(unsupported(format!("type {other}"))),
        None => Err(unsupported("missing type".into())),
    }
}

fn bound(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<String>, SchemaError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(_) => Err(invalid(&format!("{path}.{key}"), "bound must be a number")),
    }
}

/// The fallback optionality rule: a description that opens with the word "Optional".
fn starts_with_optional(description: &str) -> bool {
    description
        .split_whitespace()
        .next()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .is_some_and(|w| w.eq_ignore_ascii_case("optional"))
}

fn keyword_text(key: &str, value: &Value) -> String {
    format!("[{key}={value}]")
}

fn with_suffix(text: &str, extras: &[String]) -> String {
    if extras.is_empty() {
        return text.to_string();
    }
    let mut out = text.to_string();
    for e in extras {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(e);
    }
    normalize_text(&out)
}

fn invalid(path: &str, reason: &str) -> SchemaError {
    SchemaError::Invalid {
        path: path.to_string(),
        reason: reason.to_string(),
    }
}
