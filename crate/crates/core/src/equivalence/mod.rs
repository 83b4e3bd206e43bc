//! Parses compiled text back into a catalog and checks that compilation kept
//! every structural fact of the original.

mod parse;

use serde::{Deserialize, Serialize};

use crate::operators::FillerLexicon;
use crate::schema::{semantic_atoms, AtomKind, SemanticAtom, ToolCatalog};

pub use parse::{parse_compiled, parse_compiled_full, CompiledProgram, GrammarError};

/// Outcome of [`verify_superset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// True iff no structural atom is missing.
    pub ok: bool,
    /// Structural atoms of the original absent from the compiled text.
    pub missing: Vec<SemanticAtom>,
    /// Advisory: description content words (fillers excluded) that did not survive.
    pub missing_content_words: Vec<SemanticAtom>,
}

/// Checks `atoms(parse(compiled)) ⊇ atoms(original)` on the structural kinds.
/// Description words are compared in a separate, report-only tier.
pub fn verify_superset(
    original: &ToolCatalog,
    compiled_text: &str,
    fillers: &FillerLexicon,
) -> Result<Verdict, GrammarError> {
    let parsed = parse_compiled(compiled_text)?;
    let want = semantic_atoms(original, fillers);
    let have = semantic_atoms(&parsed, fillers);
    let (missing, missing_content_words): (Vec<SemanticAtom>, Vec<SemanticAtom>) =
        want.difference(&have).cloned().partition(|a| a.kind.is_structural());
    debug_assert!(missing_content_words
        .iter()
        .all(|a| a.kind == AtomKind::DescriptionContentWord));
    Ok(Verdict {
        ok: missing.is_empty(),
        missing,
        missing_content_words,
    })
}
