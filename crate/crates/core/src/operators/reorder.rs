//! Structure-reordering operators: CFO and CAS. Both permute whole tool
//! groups and never change atom text.

use std::collections::{BTreeSet, HashMap};

use super::{OpError, Rewrite};
use crate::ir::{AtomId, FragilityScore, PromptIR, ToolGroup};

/// Number of groups CAS moves to the edges of the tool region.
pub const DEFAULT_BOOKENDS: usize = 2;

/// Causal-Flow Ordering: stable topological sort of tool groups so every
/// dependency edge `(a, b)` has `a` before `b`. Unconstrained groups keep
/// their relative order.
pub fn cfo(ir: &PromptIR) -> Result<Rewrite, OpError> {
    let groups = ir.groups();
    let index: HashMap<AtomId, usize> = groups.iter().enumerate().map(|(i, g)| (g.tool_def, i)).collect();
    let n = groups.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut indeg = vec![0usize; n];
    for (a, b) in ir.dependency_edges() {
        if let (Some(&a), Some(&b)) = (index.get(a), index.get(b)) {
            if succ[a].insert(b) {
                indeg[b] += 1;
            }
        }
    }

    // Kahn's algorithm, always releasing the earliest ready group
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() < n {
        return Err(OpError::CyclicDependency {
            cycle: find_cycle(&succ, &indeg)
                .into_iter()
                .map(|i| groups[i].tool.clone())
                .collect(),
        });
    }
    Ok(permute_groups(ir, &groups, &order))
}

/// Walks successor edges among the unreleased nodes until one repeats.
fn find_cycle(succ: &[BTreeSet<usize>], indeg: &[usize]) -> Vec<usize> {
    let start = (0..indeg.len()).find(|&i| indeg[i] > 0).expect("a cycle remains");
    let mut path = vec![start];
    let mut at = start;
    loop {
        let next = *succ[at]
            .iter()
            .find(|&&j| indeg[j] > 0)
            .expect("every unreleased node has an unreleased successor on the cycle");
        if let Some(pos) = path.iter().position(|&p| p == next) {
            let mut cycle = path[pos..].to_vec();
            cycle.push(next);
            return cycle;
        }
        path.push(next);
        at = next;
    }
}

/// Context-Aware Structuring: the most fragile tool group goes to the front
/// of the tool region and the next most fragile to the back (more bookends
/// alternate front/back). Ties go to the earlier group for the front and the
/// later group for the back, so uniform scores leave the order unchanged.
pub fn cas(ir: &PromptIR, scores: &[FragilityScore], bookends: usize) -> Rewrite {
    let groups = ir.groups();
    if groups.len() < 2 || bookends == 0 {
        return Rewrite::unchanged(ir);
    }
    let by_id: HashMap<AtomId, f64> = scores.iter().map(|s| (s.atom_id, s.fragility)).collect();
    let atoms = ir.atoms();
    let score: Vec<f64> = groups
        .iter()
        .map(|g| {
            g.indices
                .iter()
                .filter_map(|&i| by_id.get(&atoms[i].id).copied())
                .fold(0.0, f64::max)
        })
        .collect();

    let mut remaining: Vec<usize> = (0..groups.len()).collect();
    let mut front = Vec::new();
    let mut back = Vec::new();
    for k in 0..bookends.min(groups.len()) {
        let pick = if k % 2 == 0 {
            // earliest maximum
            remaining
                .iter()
                .copied()
                .reduce(|best, i| if score[i] > score[best] { i } else { best })
        } else {
            // latest maximum
            remaining
                .iter()
                .copied()
                .reduce(|best, i| if score[i] >= score[best] { i } else { best })
        }
        .expect("non-empty");
        remaining.retain(|&i| i != pick);
        if k % 2 == 0 {
            front.push(pick);
        } else {
            back.push(pick);
        }
    }
    back.reverse();
    let order: Vec<usize> = front.into_iter().chain(remaining).chain(back).collect();
    permute_groups(ir, &groups, &order)
}

/// Rewrites the slots occupied by group atoms so groups appear in `order`.
fn permute_groups(ir: &PromptIR, groups: &[ToolGroup], order: &[usize]) -> Rewrite {
    if order.iter().enumerate().all(|(k, &i)| k == i) {
        return Rewrite::unchanged(ir);
    }
    let atoms = ir.atoms();
    let mut slots: Vec<usize> = groups.iter().flat_map(|g| g.indices.iter().copied()).collect();
    slots.sort_unstable();
    let sequence: Vec<usize> = order.iter().flat_map(|&g| groups[g].indices.iter().copied()).collect();

    let mut out = atoms.to_vec();
    let mut touched = Vec::new();
    for (&slot, &src) in slots.iter().zip(&sequence) {
        if slot != src {
            touched.push(atoms[src].id);
        }
        out[slot] = atoms[src].clone();
    }
    Rewrite {
        ir: ir.with_atoms(out),
        touched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{lower_to_ir, score_fragility, Atom, Role};
    use crate::operators::{DelimiterTable, FillerLexicon};
    use crate::schema::{Dialect, ToolCatalog, ToolSchema};

    fn catalog(tools: &[(&str, &str)]) -> PromptIR {
        let tools = tools.iter().map(|(n, d)| ToolSchema::new(*n, *d)).collect();
        let cat = ToolCatalog::new(tools, Dialect::Mcp).unwrap();
        lower_to_ir(&cat, None, FillerLexicon::shipped(), DelimiterTable::shipped())
    }

    fn tool_order(ir: &PromptIR) -> Vec<String> {
        ir.groups().into_iter().map(|g| g.tool).collect()
    }

    /// One score per group, attached to the tool-def atom.
    fn group_scores(ir: &PromptIR, values: &[f64]) -> Vec<FragilityScore> {
        ir.groups()
            .iter()
            .zip(values)
            .map(|(g, &f)| FragilityScore {
                atom_id: g.tool_def,
                importance: 1.0,
                accessibility_proxy: 1.0,
                fragility: f,
            })
            .collect()
    }

    #[test]
    fn cfo_without_edges_is_identity() {
        let ir = catalog(&[("a", ""), ("b", "")]);
        assert_eq!(cfo(&ir).unwrap(), Rewrite::unchanged(&ir));
    }

    #[test]
    fn cfo_orders_dependencies() {
        let ir = catalog(&[("b", "Runs after a"), ("a", "")]);
        let out = cfo(&ir).unwrap();
        assert_eq!(tool_order(&out.ir), ["a", "b"]);
        for (from, to) in out.ir.dependency_edges() {
            assert!(out.ir.position(*from) < out.ir.position(*to));
        }
    }

    #[test]
    fn cfo_reports_cycles() {
        let ir = catalog(&[("a", "Runs after b"), ("b", "requires a")]);
        assert_eq!(
            cfo(&ir),
            Err(OpError::CyclicDependency {
                cycle: vec!["a".into(), "b".into(), "a".into()]
            })
        );
    }

    #[test]
    fn cas_bookends() {
        let ir = catalog(&[("tool1", ""), ("tool2", ""), ("tool3", "")]);
        let out = cas(&ir, &group_scores(&ir, &[0.2, 0.9, 0.5]), DEFAULT_BOOKENDS);
        // highest to the front, second highest to the back
        assert_eq!(tool_order(&out.ir), ["tool2", "tool1", "tool3"]);

        let uniform = cas(&ir, &group_scores(&ir, &[0.4, 0.4, 0.4]), DEFAULT_BOOKENDS);
        assert_eq!(uniform, Rewrite::unchanged(&ir));

        let one = catalog(&[("solo", "x")]);
        let scores = score_fragility(&one, 0.5).unwrap();
        assert_eq!(cas(&one, &scores, DEFAULT_BOOKENDS), Rewrite::unchanged(&one));
    }

    #[test]
    fn cas_keeps_groups_intact_and_constraint_first() {
        let mut ir = catalog(&[("a", "first"), ("b", "second"), ("c", "third")]);
        let mut atoms = ir.atoms().to_vec();
        atoms.insert(
            0,
            Atom {
                id: 99,
                role: Role::Constraint,
                text: "[ANSWER:json]".into(),
                importance: 1.0,
                owner_tool: None,
                origin: None,
            },
        );
        ir = PromptIR::new(atoms, vec![]).unwrap();
        let out = cas(&ir, &group_scores(&ir, &[0.1, 0.3, 0.2]), DEFAULT_BOOKENDS);
        assert_eq!(out.ir.atoms()[0].id, 99);
        assert_eq!(tool_order(&out.ir), ["b", "a", "c"]);
        for g in out.ir.groups() {
            let idx = &g.indices;
            assert!(idx.windows(2).all(|w| w[1] == w[0] + 1), "group {} split", g.tool);
        }
    }
}
