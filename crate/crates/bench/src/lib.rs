//! Inputs shared by the benchmarks.

use tscg_core::corpus::{fixtures_dir, load_fixture, CorpusError};
use tscg_core::ToolCatalog;

/// The synthetic catalogs, smallest first.
pub const SYNTHETIC: [&str; 3] = [
    "synthetic_16.openai-fc.json",
    "synthetic_43.mcp.json",
    "synthetic_100.openai-fc.json",
];

pub fn synthetic() -> Result<Vec<(String, ToolCatalog)>, CorpusError> {
    SYNTHETIC
        .iter()
        .map(|file| load_fixture(&fixtures_dir().join(file)).map(|f| (f.name, f.catalog)))
        .collect()
}
