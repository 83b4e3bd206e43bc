use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use super::MetricsError;

/// One tool invocation, predicted or gold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl ToolCall {
    pub fn new(tool: impl Into<String>) -> Self {
        Self {
            tool: tool.into(),
            params: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    #[serde(deserialize_with = "string_or_number")]
    pub task_id: String,
    pub condition: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub predicted: Vec<ToolCall>,
    #[serde(default)]
    pub gold: Vec<ToolCall>,
}

fn string_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    match Value::deserialize(d)? {
        Value::String(s) => Ok(s),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(serde::de::Error::custom(format!(
            "task_id must be a string or number, got {other}"
        ))),
    }
}

/// Recorded evaluation outcomes; `(task_id, condition, seed)` is unique.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Transcript {
    records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn new(records: Vec<TranscriptRecord>) -> Result<Self, MetricsError> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert((&r.task_id, &r.condition, r.seed)) {
                return Err(MetricsError::DuplicateRecord {
                    task_id: r.task_id.clone(),
                    condition: r.condition.clone(),
                    seed: r.seed,
                });
            }
        }
        Ok(Self { records })
    }

    /// One JSON record per non-blank line.
    pub fn from_jsonl(text: &str) -> Result<Self, MetricsError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str(line).map_err(|e| MetricsError::MalformedTranscript {
                line: i + 1,
                reason: e.to_string(),
            })?;
            records.push(record);
        }
        Self::new(records)
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }

    pub fn records(&self) -> &[TranscriptRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Conditions in order of first appearance.
    pub fn conditions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.condition.as_str()) {
                out.push(&r.condition);
            }
        }
        out
    }

    pub fn for_condition<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a TranscriptRecord> + 'a {
        self.records.iter().filter(move |r| r.condition == condition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let text = r#"{"task_id":"t1","condition":"a","seed":1,"predicted":[{"tool":"f","params":{"x":1}}],"gold":[{"tool":"f","params":{"x":1}}]}
{"task_id":7,"condition":"b","seed":1,"predicted":[],"gold":[{"tool":"g"}]}
"#;
        let t = Transcript::from_jsonl(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.records()[1].task_id, "7");
        assert_eq!(t.conditions(), ["a", "b"]);
        assert_eq!(Transcript::from_jsonl(&t.to_jsonl()).unwrap(), t);
    }

    #[test]
    fn duplicates_and_bad_lines_are_rejected() {
        let line = r#"{"task_id":"t","condition":"a","seed":0}"#;
        assert!(matches!(
            Transcript::from_jsonl(&format!("{line}\n{line}")),
            Err(MetricsError::DuplicateRecord { .. })
        ));
        assert!(matches!(
            Transcript::from_jsonl("{\"task_id\":\"t\"}\nnot json"),
            Err(MetricsError::MalformedTranscript { line: 1, .. })
        ));
    }
}
