mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use tscg_core::operators::{self, OperatorClass, Rewrite};
use tscg_core::pipeline::emit;
use tscg_core::{
    lower_to_ir, score_fragility, verify_superset, DelimiterTable, FillerLexicon, OpError, Operator, PromptIR,
    SadBudget, TokenCounter, ToolCatalog,
};

fn lower(cat: &ToolCatalog) -> PromptIR {
    lower_to_ir(cat, Some("json"), FillerLexicon::shipped(), DelimiterTable::shipped())
}

fn apply(op: Operator, ir: &PromptIR) -> Rewrite {
    let gpt2 = TokenCounter::gpt2();
    let (fillers, delims) = (FillerLexicon::shipped(), DelimiterTable::shipped());
    let scores = || score_fragility(ir, 0.5).unwrap();
    match op {
        Operator::Sdm => operators::sdm(ir, fillers),
        Operator::Tas => operators::tas(ir, delims, gpt2).unwrap(),
        Operator::Dro => operators::dro(ir, delims, gpt2),
        Operator::Cfl => operators::cfl(ir),
        Operator::Cfo => operators::cfo(ir).unwrap(),
        Operator::Cas => operators::cas(ir, &scores(), operators::DEFAULT_BOOKENDS),
        Operator::SadF => operators::sad_f(ir, &scores(), SadBudget(operators::DEFAULT_SAD_BUDGET), gpt2).unwrap(),
        Operator::Ccp => operators::ccp(ir, &scores(), operators::DEFAULT_CCP_K),
    }
}

fn count(ir: &PromptIR) -> usize {
    TokenCounter::gpt2().count(&emit(ir))
}

fn check_class(op: Operator, before: usize, after: usize) -> Result<(), String> {
    let ok = match op.class() {
        OperatorClass::Reducing => after <= before,
        OperatorClass::Reordering => after == before,
        OperatorClass::Expanding => after >= before,
    };
    ok.then_some(()).ok_or_else(|| format!("{op}: {before} -> {after}"))
}

fn assert_disjoint(ir: &PromptIR) {
    let sets: Vec<(Operator, HashSet<_>)> = [Operator::Sdm, Operator::Dro, Operator::Tas]
        .into_iter()
        .map(|op| (op, apply(op, ir).touched.into_iter().collect()))
        .collect();
    for (i, (a, sa)) in sets.iter().enumerate() {
        for (b, sb) in &sets[i + 1..] {
            assert!(
                sa.is_disjoint(sb),
                "{a} and {b} both touch {:?}",
                sa.intersection(sb).collect::<Vec<_>>()
            );
        }
    }
}

fn assert_topological(ir: &PromptIR) {
    for &(from, to) in ir.dependency_edges() {
        assert!(ir.position(from) < ir.position(to), "edge {from} -> {to} violated");
    }
}

#[test]
fn every_operator_alone_preserves_semantics_on_fixtures() {
    for f in common::fixtures() {
        let ir = lower(&f.catalog);
        for op in Operator::ORDER {
            let text = emit(&apply(op, &ir).ir);
            let v = verify_superset(&f.catalog, &text, FillerLexicon::shipped()).unwrap();
            assert!(v.ok, "{} / {op}: {:?}", f.name, v.missing);
        }
    }
}

#[test]
fn reducing_operators_act_on_disjoint_atoms_of_fixtures() {
    for f in common::fixtures() {
        assert_disjoint(&lower(&f.catalog));
    }
}

#[test]
fn cfo_orders_the_dependency_fixture() {
    let f = common::fixtures()
        .into_iter()
        .find(|f| f.name == "deps_pipeline")
        .unwrap();
    let ir = lower(&f.catalog);
    assert!(!ir.dependency_edges().is_empty());
    assert_topological(&apply(Operator::Cfo, &ir).ir);
}

#[test]
fn cfo_reports_a_cycle() {
    let cat = ToolCatalog::new(
        vec![
            tscg_core::ToolSchema::new("alpha", "Run after beta."),
            tscg_core::ToolSchema::new("beta", "Requires alpha."),
        ],
        tscg_core::Dialect::Mcp,
    )
    .unwrap();
    match operators::cfo(&lower(&cat)) {
        Err(OpError::CyclicDependency { cycle }) => {
            assert!(
                cycle.contains(&"alpha".to_string()) && cycle.contains(&"beta".to_string()),
                "{cycle:?}"
            )
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn operators_keep_their_token_class(cat in common::catalog(5)) {
        let ir = lower(&cat);
        let before = count(&ir);
        for op in Operator::ORDER {
            let after = count(&apply(op, &ir).ir);
            prop_assert!(check_class(op, before, after).is_ok(), "{}", check_class(op, before, after).unwrap_err());
        }
    }

    #[test]
    fn operators_are_pure(cat in common::catalog(5)) {
        let ir = lower(&cat);
        for op in Operator::ORDER {
            prop_assert_eq!(apply(op, &ir), apply(op, &ir.clone()));
        }
    }

    #[test]
    fn operators_preserve_semantics(cat in common::catalog(5)) {
        let ir = lower(&cat);
        for op in Operator::ORDER {
            let v = verify_superset(&cat, &emit(&apply(op, &ir).ir), FillerLexicon::shipped()).unwrap();
            prop_assert!(v.ok, "{op}: {:?}", v.missing);
        }
    }

    #[test]
    fn reducing_operators_act_on_disjoint_atoms(cat in common::catalog(5)) {
        assert_disjoint(&lower(&cat));
    }

    #[test]
    fn sad_f_stays_within_budget(cat in common::catalog(5), budget in 0usize..200) {
        let ir = lower(&cat);
        let gpt2 = TokenCounter::gpt2();
        let out = operators::sad_f(&ir, &score_fragility(&ir, 0.5).unwrap(), SadBudget(budget), gpt2).unwrap();
        let added = count(&out.ir) - count(&ir);
        prop_assert!(added <= budget, "added {added} > {budget}");
    }

    #[test]
    fn ccp_is_idempotent(cat in common::catalog(5), k in 0usize..5) {
        let ir = lower(&cat);
        let once = operators::ccp(&ir, &score_fragility(&ir, 0.5).unwrap(), k).ir;
        let twice = operators::ccp(&once, &score_fragility(&once, 0.5).unwrap(), k).ir;
        prop_assert_eq!(once, twice);
    }
}
