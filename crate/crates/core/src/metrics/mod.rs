//! Offline evaluation arithmetic over recorded transcripts: accuracy
//! scoring, baseline ratios, effect decomposition, a gap regression, and the
//! significance toolkit (bootstrap CI, exact McNemar, Holm–Bonferroni).

mod regression;
mod scoring;
mod stats;
mod transcript;

use thiserror::Error;

pub use regression::{fit_gap_predictor, GapPredictor};
pub use scoring::{
    arr, decompose, overall_accuracy, record_scores, score_transcript, score_transcript_with, sdm_attention_uplift,
    Decomposition, F1Averaging, RecordScore, Scores, OVERALL_PF1_WEIGHT, OVERALL_TSA_WEIGHT,
};
pub use stats::{bootstrap_ci, holm_bonferroni, mcnemar, paired_discordance, BootstrapConfig, HolmResult};
pub use transcript::{ToolCall, Transcript, TranscriptRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("transcript has no records")]
    EmptyTranscript,
    #[error("condition `{0}` is not in the transcript")]
    UnknownCondition(String),
    #[error("duplicate record (task {task_id}, condition {condition}, seed {seed})")]
    DuplicateRecord {
        task_id: String,
        condition: String,
        seed: u64,
    },
    #[error("transcript line {line}: {reason}")]
    MalformedTranscript { line: usize, reason: String },
    #[error("baseline accuracy must be positive, got {0}")]
    DivisionByZeroBaseline(f64),
    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),
    #[error("need 0 <= k < n, got n={n}, k={k}")]
    InvalidLengths { n: usize, k: usize },
    #[error("no samples")]
    EmptySamples,
    #[error("p-value {value} at index {index} is outside [0, 1]")]
    OutOfRangeP { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
