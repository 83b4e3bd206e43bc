//! Token-expanding operators: SAD-F and CCP.

use std::collections::{HashMap, HashSet};

use super::{OpError, Rewrite, SadBudget};
use crate::grammar::RECAP_PREFIX;
use crate::ir::{Atom, AtomId, FragilityScore, PromptIR, Role};
use crate::pipeline::emit::{anchor_line, record_text};
use crate::tokenizer::TokenCounter;

pub const DEFAULT_SAD_BUDGET: usize = 20;
pub const DEFAULT_CCP_K: usize = 3;

/// Tokens an anchor duplicate of `text` adds to the emitted output: its
/// own `[RECAP] text` line plus the line break before it.
pub fn anchor_cost(text: &str, counter: TokenCounter<'_>) -> usize {
    counter.count(&format!("\n{}", anchor_line(text)))
}

/// Selective Anchor Duplication with Fragility: duplicates atoms in
/// descending fragility-per-token order while the added tokens fit in `B`.
/// Greedy without backtracking: an item that does not fit is skipped and the
/// scan continues; no atom is duplicated twice.
pub fn sad_f(
    ir: &PromptIR,
    scores: &[FragilityScore],
    budget: SadBudget,
    counter: TokenCounter<'_>,
) -> Result<Rewrite, OpError> {
    counter.require_exact("SAD-F")?;
    if budget.is_zero() {
        return Ok(Rewrite::unchanged(ir));
    }
    let fragility: HashMap<AtomId, f64> = scores.iter().map(|s| (s.atom_id, s.fragility)).collect();
    let already: HashSet<AtomId> = ir
        .atoms()
        .iter()
        .filter(|a| a.role == Role::AnchorDup)
        .filter_map(|a| a.origin)
        .collect();

    let mut candidates: Vec<(usize, f64, usize)> = ir
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| {
            matches!(
                a.role,
                Role::ToolDef | Role::ParamBlock | Role::Description | Role::Constraint
            ) && !a.text.trim().is_empty()
                && !already.contains(&a.id)
        })
        .map(|(i, a)| {
            let cost = anchor_cost(&a.text, counter);
            let f = fragility.get(&a.id).copied().unwrap_or(0.0);
            (i, f / cost as f64, cost)
        })
        .collect();
    // stable: equal ratios keep IR order
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut used = 0;
    let mut dups = Vec::new();
    let mut next_id = ir.next_id();
    for (i, _, cost) in candidates {
        if used + cost > budget.max_tokens() {
            continue;
        }
        used += cost;
        let src = &ir.atoms()[i];
        dups.push(Atom {
            id: next_id,
            role: Role::AnchorDup,
            text: src.text.clone(),
            importance: 0.0,
            owner_tool: src.owner_tool.clone(),
            origin: Some(src.id),
        });
        next_id += 1;
    }
    if dups.is_empty() {
        return Ok(Rewrite::unchanged(ir));
    }

    // anchors go after existing anchors and before any closure
    let mut atoms = ir.atoms().to_vec();
    let at = atoms
        .iter()
        .position(|a| a.role == Role::Closure)
        .unwrap_or(atoms.len());
    let touched = dups.iter().map(|a| a.id).collect();
    atoms.splice(at..at, dups);
    Ok(Rewrite {
        ir: ir.with_atoms(atoms),
        touched,
    })
}

/// Closure-Block Completion Priming: one closing `[RECAP] a; b; c` atom
/// listing the `k` most fragile items — a whole tool record, or the
/// constraint. The last tool group is already at the end and is never
/// recapped. An existing closure is replaced, so applying twice equals once.
pub fn ccp(ir: &PromptIR, scores: &[FragilityScore], k: usize) -> Rewrite {
    let base = ir.with_atoms(ir.atoms().iter().filter(|a| a.role != Role::Closure).cloned().collect());
    let mut out = base.clone();
    let items = recap_items(&base, scores, k);
    if !items.is_empty() {
        let mut atoms = base.atoms().to_vec();
        atoms.push(Atom {
            id: base.next_id(),
            role: Role::Closure,
            text: format!("{RECAP_PREFIX} {}", items.join("; ")),
            importance: 0.0,
            owner_tool: None,
            origin: None,
        });
        out = base.with_atoms(atoms);
    }
    let touched = symmetric_difference(ir, &out);
    Rewrite { ir: out, touched }
}

fn recap_items(ir: &PromptIR, scores: &[FragilityScore], k: usize) -> Vec<String> {
    if k == 0 {
        return Vec::new();
    }
    let groups = ir.groups();
    let last_tool = groups.last().map(|g| g.tool.clone());
    let group_of: HashMap<&str, &[usize]> = groups.iter().map(|g| (g.tool.as_str(), g.indices.as_slice())).collect();
    let fragility: HashMap<AtomId, f64> = scores.iter().map(|s| (s.atom_id, s.fragility)).collect();

    let mut ranked: Vec<(usize, f64)> = ir
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.role.is_appendix())
        .map(|(i, a)| (i, fragility.get(&a.id).copied().unwrap_or(0.0)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut seen = HashSet::new();
    let mut items = Vec::new();
    for (i, _) in ranked {
        let a = &ir.atoms()[i];
        let item = match (a.role, a.owner_tool.as_deref()) {
            (Role::Constraint, _) => a.text.clone(),
            (r, Some(tool)) if r.in_tool_group() => {
                if last_tool.as_deref() == Some(tool) {
                    continue;
                }
                record_text(group_of[tool].iter().map(|&j| &ir.atoms()[j]))
            }
            _ => continue,
        };
        if seen.insert(item.clone()) {
            items.push(item);
            if items.len() == k {
                break;
            }
        }
    }
    items
}

fn symmetric_difference(a: &PromptIR, b: &PromptIR) -> Vec<AtomId> {
    let left: HashMap<AtomId, &str> = a.atoms().iter().map(|x| (x.id, x.text.as_str())).collect();
    let right: HashMap<AtomId, &str> = b.atoms().iter().map(|x| (x.id, x.text.as_str())).collect();
    let mut ids: Vec<AtomId> = left
        .iter()
        .filter(|(id, t)| right.get(id) != Some(t))
        .map(|(id, _)| *id)
        .chain(right.keys().filter(|id| !left.contains_key(id)).copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{lower_to_ir, score_fragility};
    use crate::operators::{DelimiterTable, FillerLexicon};
    use crate::pipeline::emit;
    use crate::schema::{Dialect, ToolCatalog, ToolSchema};

    fn catalog(tools: &[(&str, &str)]) -> PromptIR {
        let tools = tools.iter().map(|(n, d)| ToolSchema::new(*n, *d)).collect();
        let cat = ToolCatalog::new(tools, Dialect::Mcp).unwrap();
        lower_to_ir(&cat, None, FillerLexicon::shipped(), DelimiterTable::shipped())
    }

    fn scores_for(ir: &PromptIR, f: &[(AtomId, f64)]) -> Vec<FragilityScore> {
        ir.atoms()
            .iter()
            .map(|a| FragilityScore {
                atom_id: a.id,
                importance: a.importance,
                accessibility_proxy: 1.0,
                fragility: f.iter().find(|(id, _)| *id == a.id).map_or(0.0, |x| x.1),
            })
            .collect()
    }

    #[test]
    fn zero_budget_is_identity() {
        let ir = catalog(&[("a", "alpha")]);
        let s = score_fragility(&ir, 0.5).unwrap();
        assert_eq!(
            sad_f(&ir, &s, SadBudget(0), TokenCounter::gpt2()).unwrap(),
            Rewrite::unchanged(&ir)
        );
    }

    #[test]
    fn greedy_trace_skips_what_does_not_fit() {
        let gpt2 = TokenCounter::gpt2();
        let ir = catalog(&[("alpha", "one two three four five six")]);
        // ids: 0 tool-def "alpha", 1 param-block "()", 2 description
        let costs: Vec<usize> = ir.atoms().iter().map(|a| anchor_cost(&a.text, gpt2)).collect();
        // the tool-def dominates by ratio; the budget leaves less than the next item needs
        let scores = scores_for(&ir, &[(0, 0.9), (1, 0.0), (2, 0.5)]);
        let budget = costs[0] + costs[2] - 1;
        let out = sad_f(&ir, &scores, SadBudget(budget), gpt2).unwrap();
        let dups: Vec<_> = out.ir.atoms().iter().filter(|a| a.role == Role::AnchorDup).collect();
        assert_eq!(
            dups.len(),
            2,
            "tool-def and the cheap param block fit, the description does not"
        );
        assert_eq!(dups[0].origin, Some(0));
        assert!(dups.iter().all(|d| d.origin != Some(2)));
        let added = gpt2.count(&emit(&out.ir)) - gpt2.count(&emit(&ir));
        assert!(added <= budget);
    }

    #[test]
    fn large_budget_duplicates_everything_once() {
        let gpt2 = TokenCounter::gpt2();
        let ir = catalog(&[("a", "first tool"), ("b", "second tool")]);
        let s = score_fragility(&ir, 0.5).unwrap();
        let once = sad_f(&ir, &s, SadBudget(10_000), gpt2).unwrap();
        let dups = once.ir.atoms().iter().filter(|a| a.role == Role::AnchorDup).count();
        assert_eq!(dups, ir.len());
        let s2 = score_fragility(&once.ir, 0.5).unwrap();
        let twice = sad_f(&once.ir, &s2, SadBudget(10_000), gpt2).unwrap();
        assert_eq!(twice.ir, once.ir);
    }

    #[test]
    fn ccp_recaps_in_fragility_order_and_is_idempotent() {
        let ir = catalog(&[("a", "first"), ("b", "second"), ("c", "third")]);
        let groups = ir.groups();
        let scores = scores_for(&ir, &[(groups[0].tool_def, 0.4), (groups[1].tool_def, 0.8)]);
        let once = ccp(&ir, &scores, 2);
        assert_eq!(once.ir.atoms().last().unwrap().text, "[RECAP] b()|second; a()|first");
        let twice = ccp(&once.ir, &scores, 2);
        assert_eq!(twice.ir, once.ir);
        assert_eq!(ccp(&ir, &scores, 0), Rewrite::unchanged(&ir));
        // k = 0 also removes an earlier closure
        assert_eq!(ccp(&once.ir, &scores, 0).ir, ir);
    }
}
