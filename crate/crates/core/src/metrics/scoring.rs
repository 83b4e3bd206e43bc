use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{MetricsError, ToolCall, Transcript, TranscriptRecord};

pub const OVERALL_TSA_WEIGHT: f64 = 0.6;
pub const OVERALL_PF1_WEIGHT: f64 = 0.4;

/// How parameter F1 is aggregated across records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Averaging {
    /// Pool true/false positives over all records, then compute F1.
    #[default]
    Micro,
    /// Mean of per-record F1.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub tsa: f64,
    pub pf1: f64,
    pub overall: f64,
    pub records: usize,
}

/// Per-record outcome used by the significance tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordScore {
    pub tool_correct: bool,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl RecordScore {
    pub fn f1(&self) -> f64 {
        f1(self.true_positives, self.false_positives, self.false_negatives)
    }

    pub fn overall(&self) -> f64 {
        overall_accuracy(if self.tool_correct { 1.0 } else { 0.0 }, self.f1())
    }
}

/// `0.6 · TSA + 0.4 · PF1`.
pub fn overall_accuracy(tsa: f64, pf1: f64) -> f64 {
    OVERALL_TSA_WEIGHT * tsa + OVERALL_PF1_WEIGHT * pf1
}

/// F1 over counts; 1 when there was nothing to predict and nothing predicted.
fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        1.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

/// Parameter values compare as trimmed strings; numbers in canonical decimal
/// form, so `1`, `1.0` and `"1"` agree.
fn canonical_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f}"),
            _ => n.to_string(),
        },
        Value::Object(map) => {
            let mut entries: Vec<(&String, String)> = map.iter().map(|(k, v)| (k, canonical_value(v))).collect();
            entries.sort();
            format!("{entries:?}")
        }
        Value::Array(items) => format!("{:?}", items.iter().map(canonical_value).collect::<Vec<_>>()),
        other => other.to_string(),
    }
}

fn param_pairs(calls: &[ToolCall]) -> BTreeSet<(String, String)> {
    calls
        .iter()
        .flat_map(|c| c.params.iter().map(|(k, v)| (k.clone(), canonical_value(v))))
        .collect()
}

fn tool_set(calls: &[ToolCall]) -> BTreeSet<&str> {
    calls.iter().map(|c| c.tool.as_str()).collect()
}

fn score_record(r: &TranscriptRecord) -> RecordScore {
    let predicted = param_pairs(&r.predicted);
    let gold = param_pairs(&r.gold);
    let tp = predicted.intersection(&gold).count();
    RecordScore {
        tool_correct: tool_set(&r.predicted) == tool_set(&r.gold),
        true_positives: tp,
        false_positives: predicted.len() - tp,
        false_negatives: gold.len() - tp,
    }
}

/// Per-record scores for one condition, in transcript order.
pub fn record_scores<'a>(
    t: &'a Transcript,
    condition: &'a str,
) -> impl Iterator<Item = (&'a TranscriptRecord, RecordScore)> + 'a {
    t.for_condition(condition).map(|r| (r, score_record(r)))
}

/// TSA (exact tool-set match rate), micro parameter F1, and their composite.
pub fn score_transcript(t: &Transcript, condition: &str) -> Result<Scores, MetricsError> {
    score_transcript_with(t, condition, F1Averaging::Micro)
}

pub fn score_transcript_with(t: &Transcript, condition: &str, averaging: F1Averaging) -> Result<Scores, MetricsError> {
    if t.is_empty() {
        return Err(MetricsError::EmptyTranscript);
    }
    let scores: Vec<RecordScore> = record_scores(t, condition).map(|(_, s)| s).collect();
    if scores.is_empty() {
        return Err(MetricsError::UnknownCondition(condition.to_string()));
    }
    let n = scores.len() as f64;
    let tsa = scores.iter().filter(|s| s.tool_correct).count() as f64 / n;
    let pf1 = match averaging {
        F1Averaging::Micro => {
            let (tp, fp, fn_) = scores.iter().fold((0, 0, 0), |(a, b, c), s| {
                (a + s.true_positives, b + s.false_positives, c + s.false_negatives)
            });
            f1(tp, fp, fn_)
        }
        F1Averaging::Macro => scores.iter().map(RecordScore::f1).sum::<f64>() / n,
    };
    Ok(Scores {
        tsa,
        pf1,
        overall: overall_accuracy(tsa, pf1),
        records: scores.len(),
    })
}

/// Accuracy-retained ratio: compiled accuracy over the native baseline.
pub fn arr(compiled_acc: f64, baseline_acc: f64) -> Result<f64, MetricsError> {
    if baseline_acc.is_nan() || baseline_acc <= 0.0 {
        return Err(MetricsError::DivisionByZeroBaseline(baseline_acc));
    }
    Ok(compiled_acc / baseline_acc)
}

/// Accuracy change split into the JSON→text format effect and the
/// text→compiled compression effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub format_effect: f64,
    pub compression_effect: f64,
}

/// Inputs are quantized to millionths of a point so the two effects sum to
/// `compiled - natural_fc` exactly and two-decimal inputs give exact
/// one-decimal differences (`51.1 - 74.0` is `-22.9`, not `-22.900000000000006`).
pub fn decompose(natural_fc: f64, natural_text: f64, compiled: f64) -> Decomposition {
    let q = |x: f64| (x * 1e6).round() as i64;
    let (fc, text, c) = (q(natural_fc), q(natural_text), q(compiled));
    Decomposition {
        format_effect: (text - fc) as f64 / 1e6,
        compression_effect: (c - text) as f64 / 1e6,
    }
}

/// Lower bound `n / (n - k)` on the per-atom attention gain from removing
/// `k` filler tokens out of `n`.
pub fn sdm_attention_uplift(n: usize, k: usize) -> Result<f64, MetricsError> {
    if k >= n {
        return Err(MetricsError::InvalidLengths { n, k });
    }
    Ok(n as f64 / (n - k) as f64)
}
