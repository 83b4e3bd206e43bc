use serde::{Deserialize, Serialize};

use super::{AtomId, IrError, PromptIR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragilityScore {
    pub atom_id: AtomId,
    pub importance: f64,
    pub accessibility_proxy: f64,
    pub fragility: f64,
}

/// U-shaped positional proxy for how well position `i` of `n` is attended:
/// 1 at both ends, 0.5 in the middle. A lone atom sits at both ends.
pub fn accessibility_proxy(i: usize, n: usize) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let x = i as f64 / (n - 1) as f64;
    x.max(1.0 - x)
}

/// `F(a) = alpha * importance + (1 - alpha) * (1 - proxy(pos(a)))`.
///
/// Positions count only original prompt atoms; appended recap atoms sit at
/// the end and get proxy 1, so adding a recap never shifts other scores.
pub fn score_fragility(ir: &PromptIR, alpha: f64) -> Result<Vec<FragilityScore>, IrError> {
    if ir.is_empty() {
        return Err(IrError::EmptyIR);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(IrError::InvalidAlpha(alpha));
    }
    let n = ir.atoms().iter().filter(|a| !a.role.is_appendix()).count();
    let mut pos = 0;
    Ok(ir
        .atoms()
        .iter()
        .map(|a| {
            let proxy = if a.role.is_appendix() {
                1.0
            } else {
                pos += 1;
                accessibility_proxy(pos - 1, n)
            };
            FragilityScore {
                atom_id: a.id,
                importance: a.importance,
                accessibility_proxy: proxy,
                fragility: alpha * a.importance + (1.0 - alpha) * (1.0 - proxy),
            }
        })
        .collect())
}
