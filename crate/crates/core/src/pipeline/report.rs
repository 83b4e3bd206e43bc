use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::operators::{Operator, OperatorClass};

/// Name of the per-op entry for the JSON → grammar translation itself.
pub const FORMAT_PASS: &str = "FORMAT";

/// Token accounting for one pass. Fields are in alphabetical order so the
/// JSON form is stable for golden files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpDelta {
    /// `f_i`: tokens in the touched spans over the report's `tokens_before`.
    pub affected_fraction: f64,
    /// Whether the pass was enabled (a disabled pass is the identity).
    pub enabled: bool,
    /// `FORMAT`, or an operator tag.
    pub op: String,
    /// `r_i`: `tokens_removed / touched_tokens`, 0 when nothing was touched.
    pub reduction_factor: f64,
    /// Tokens removed by the pass; negative when it added tokens.
    pub tokens_removed: i64,
    /// Tokens in the records the pass changed, measured before it ran.
    pub touched_tokens: usize,
}

impl OpDelta {
    pub(crate) fn new(op: &str, enabled: bool, before: usize, after: usize, touched: usize, total: usize) -> Self {
        let removed = before as i64 - after as i64;
        Self {
            affected_fraction: ratio(touched, total),
            enabled,
            op: op.to_string(),
            reduction_factor: if touched == 0 {
                0.0
            } else {
                removed as f64 / touched as f64
            },
            tokens_removed: removed,
            touched_tokens: touched,
        }
    }

    pub fn operator(&self) -> Option<Operator> {
        self.op.parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    /// `Σ r_i · f_i` over the token-reducing operators.
    pub bound_rhs: f64,
    /// SHA-256 of the compiled output bytes, hex.
    pub determinism_hash: String,
    /// Enabled operators, in pipeline order.
    pub ops_applied: Vec<Operator>,
    /// `FORMAT` followed by one entry per operator in pipeline order.
    pub per_op: Vec<OpDelta>,
    pub profile: String,
    pub sad_budget: usize,
    /// `1 - tokens_after / tokens_before`; 0 for an empty baseline.
    pub savings: f64,
    pub tokenizer: String,
    pub tokens_after: usize,
    pub tokens_before: usize,
    pub tool_count: usize,
}

impl CompressionReport {
    /// Entries for the eight operators, without the format pass.
    pub fn operator_deltas(&self) -> impl Iterator<Item = (Operator, &OpDelta)> {
        self.per_op.iter().filter_map(|d| d.operator().map(|op| (op, d)))
    }

    pub fn delta(&self, op: Operator) -> Option<&OpDelta> {
        self.operator_deltas().find(|(o, _)| *o == op).map(|(_, d)| d)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub(crate) fn bound_rhs(per_op: &[OpDelta]) -> f64 {
    per_op
        .iter()
        .filter(|d| d.operator().is_some_and(|op| op.class() == OperatorClass::Reducing))
        .map(|d| d.reduction_factor * d.affected_fraction)
        .sum()
}

/// Checks `savings >= Σ r_i · f_i` over the token-reducing operators.
///
/// The inequality only holds without expansion, so a report from a run with
/// CCP, or with SAD-F at a non-zero budget, is rejected.
pub fn check_bound(report: &CompressionReport) -> Result<bool, PipelineError> {
    if report.ops_applied.contains(&Operator::Ccp) {
        return Err(PipelineError::BoundPreconditionViolated("CCP was enabled".into()));
    }
    if report.ops_applied.contains(&Operator::SadF) && report.sad_budget > 0 {
        return Err(PipelineError::BoundPreconditionViolated(format!(
            "SAD-F ran with budget {}",
            report.sad_budget
        )));
    }
    Ok(report.savings + 1e-12 >= bound_rhs(&report.per_op))
}
