use serde_json::{json, Map, Value};

use super::{Dialect, JsonType, ToolSchema};

/// Renders tools in `dialect`'s wire shape: a bare array for OpenAI and
/// Anthropic, a `{"tools": [...]}` object for MCP.
pub(crate) fn to_json(tools: &[ToolSchema], dialect: Dialect) -> Value {
    let items: Vec<Value> = tools.iter().map(|t| tool_json(t, dialect)).collect();
    match dialect {
        Dialect::Mcp => json!({ "tools": items }),
        _ => Value::Array(items),
    }
}

fn tool_json(tool: &ToolSchema, dialect: Dialect) -> Value {
    let mut properties = Map::new();
    let mut required = Vec::new();
    for p in &tool.params {
        let mut prop = Map::new();
        match (&p.json_type, &p.enum_values) {
            (JsonType::Enum, Some(values)) => {
                prop.insert("type".into(), json!("string"));
                prop.insert("enum".into(), json!(values));
            }
            (ty, _) => {
                prop.insert("type".into(), json!(ty.name()));
            }
        }
        if !p.description.is_empty() {
            prop.insert("description".into(), json!(p.description));
        }
        if let Some(b) = &p.numeric_bounds {
            for (key, v) in [("minimum", &b.min), ("maximum", &b.max)] {
                if let Some(v) = v {
                    let n = serde_json::from_str::<Value>(v).unwrap_or_else(|_| json!(v));
                    prop.insert(key.into(), n);
                }
            }
        }
        if p.required {
            required.push(json!(p.name));
        }
        properties.insert(p.name.clone(), Value::Object(prop));
    }

    let mut obj = Map::new();
    obj.insert("name".into(), json!(tool.name));
    obj.insert("description".into(), json!(tool.description));
    obj.insert(
        dialect.schema_key().into(),
        json!({ "type": "object", "properties": properties, "required": required }),
    );
    Value::Object(obj)
}
