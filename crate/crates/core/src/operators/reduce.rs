//! Token-reducing operators: SDM, TAS, DRO, CFL.

use super::{DelimiterKind, DelimiterTable, FillerLexicon, OpError, Rewrite};
use crate::ir::{Atom, PromptIR, Role};
use crate::pipeline::emit::description_line;
use crate::tokenizer::TokenCounter;

/// Semantic Density Maximization: drops filler-span atoms the lexicon matches.
/// Atoms of any other role are never touched, even if their text is filler.
pub fn sdm(ir: &PromptIR, lexicon: &FillerLexicon) -> Rewrite {
    let (removed, kept): (Vec<&Atom>, Vec<&Atom>) = ir
        .atoms()
        .iter()
        .partition(|a| a.role == Role::FillerSpan && lexicon.contains_match(&a.text));
    if removed.is_empty() {
        return Rewrite::unchanged(ir);
    }
    Rewrite {
        ir: ir.with_atoms(kept.into_iter().cloned().collect()),
        touched: removed.iter().map(|a| a.id).collect(),
    }
}

/// Tokenizer-Aligned Syntax: each symbol delimiter becomes the variant of its
/// candidate set with the fewest tokens, ties going to the earlier variant.
///
/// A replacement that would lengthen the surrounding description line (BPE
/// is context-sensitive) is skipped.
pub fn tas(ir: &PromptIR, table: &DelimiterTable, counter: TokenCounter<'_>) -> Result<Rewrite, OpError> {
    let t = counter.require_exact("TAS")?;
    Ok(rewrite_delimiters(ir, counter, |text| {
        let entry = table.symbol_for(text).filter(|e| e.kind == DelimiterKind::Symbol)?;
        let mut best: Option<(&str, usize)> = None;
        for v in &entry.variants {
            let n = t.count_tokens(v);
            if best.is_none_or(|(_, b)| n < b) {
                best = Some((v, n));
            }
        }
        best.map(|(v, _)| v.to_string())
    }))
}

/// Delimiter Role Optimization: verbose structural phrases become their compact form.
pub fn dro(ir: &PromptIR, table: &DelimiterTable, counter: TokenCounter<'_>) -> Rewrite {
    rewrite_delimiters(ir, counter, |text| {
        let entry = table.phrase_for(text).filter(|e| e.kind == DelimiterKind::Phrase)?;
        Some(entry.compact.clone())
    })
}

/// Constraint-First Layout: moves the constraint atom to position 0.
pub fn cfl(ir: &PromptIR) -> Rewrite {
    match ir.atoms().iter().position(|a| a.role == Role::Constraint) {
        None | Some(0) => Rewrite::unchanged(ir),
        Some(i) => {
            let mut atoms = ir.atoms().to_vec();
            let c = atoms.remove(i);
            let id = c.id;
            atoms.insert(0, c);
            Rewrite {
                ir: ir.with_atoms(atoms),
                touched: vec![id],
            }
        }
    }
}

/// Applies `replacement` to every delimiter atom, keeping a change only if
/// the owning description line does not grow in tokens.
fn rewrite_delimiters(
    ir: &PromptIR,
    counter: TokenCounter<'_>,
    replacement: impl Fn(&str) -> Option<String>,
) -> Rewrite {
    let mut atoms = ir.atoms().to_vec();
    let mut touched = Vec::new();
    let owners: Vec<Vec<usize>> = ir.groups().into_iter().map(|g| g.indices).collect();
    let group_of = |i: usize| owners.iter().find(|g| g.contains(&i));

    for i in 0..atoms.len() {
        if atoms[i].role != Role::Delimiter {
            continue;
        }
        let Some(new_text) = replacement(&atoms[i].text) else {
            continue;
        };
        if new_text == atoms[i].text {
            continue;
        }
        let context = group_of(i).cloned().unwrap_or_else(|| vec![i]);
        let before = counter.count(&description_line(context.iter().map(|&j| &atoms[j])));
        let old = std::mem::replace(&mut atoms[i].text, new_text);
        let after = counter.count(&description_line(context.iter().map(|&j| &atoms[j])));
        if after > before {
            atoms[i].text = old;
        } else {
            touched.push(atoms[i].id);
        }
    }
    if touched.is_empty() {
        return Rewrite::unchanged(ir);
    }
    Rewrite {
        ir: ir.with_atoms(atoms),
        touched,
    }
}
