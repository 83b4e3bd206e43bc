mod common;

use proptest::prelude::*;
use tscg_core::{
    check_bound, compile, verify_superset, FillerLexicon, Operator, PipelineConfig, PipelineError, Profile, SadBudget,
    TokenCounter, ToolCatalog,
};

fn run(cat: &ToolCatalog, cfg: &PipelineConfig) -> (String, tscg_core::CompressionReport) {
    compile(cat, cfg, TokenCounter::gpt2()).unwrap()
}

fn fixture(name: &str) -> ToolCatalog {
    common::fixtures().into_iter().find(|f| f.name == name).unwrap().catalog
}

fn without_expansion(profile: Profile) -> PipelineConfig {
    let mut cfg = PipelineConfig::for_profile(profile);
    cfg.sad_budget = SadBudget(0);
    cfg.disable.insert(Operator::Ccp);
    cfg
}

fn profile() -> impl Strategy<Value = Profile> {
    prop::sample::select(Profile::ALL.to_vec())
}

fn op_set() -> impl Strategy<Value = Vec<Operator>> {
    prop::sample::subsequence(Operator::ORDER.to_vec(), 0..=8)
}

#[test]
fn well_formed_synthetic_catalogs_save_over_half() {
    for name in ["synthetic_16", "synthetic_43"] {
        let (_, r) = run(&fixture(name), &PipelineConfig::for_profile(Profile::Balanced));
        assert!(r.savings >= 0.51, "{name}: {}", r.savings);
    }
}

#[test]
fn recap_overhead_is_bounded_on_synthetic_catalogs() {
    for name in ["synthetic_16", "synthetic_43"] {
        let (_, r) = run(&fixture(name), &PipelineConfig::for_profile(Profile::Balanced));
        let added = -r.delta(Operator::Ccp).unwrap().tokens_removed;
        assert!((40..=400).contains(&added), "{name}: CCP added {added}");
    }
}

#[test]
fn bound_holds_on_every_fixture() {
    for f in common::fixtures() {
        for p in Profile::ALL {
            let (_, r) = run(&f.catalog, &without_expansion(p));
            assert!(
                check_bound(&r).unwrap(),
                "{} / {p}: {} < {}",
                f.name,
                r.savings,
                r.bound_rhs
            );
        }
    }
}

#[test]
fn bound_check_refuses_expanding_configurations() {
    let cat = fixture("weather");
    let (_, r) = run(&cat, &PipelineConfig::for_profile(Profile::Balanced));
    assert!(matches!(
        check_bound(&r),
        Err(PipelineError::BoundPreconditionViolated(_))
    ));
    let mut cfg = without_expansion(Profile::Balanced);
    cfg.enable.insert(Operator::SadF);
    cfg.sad_budget = SadBudget(5);
    let (_, r) = run(&cat, &cfg);
    assert!(matches!(
        check_bound(&r),
        Err(PipelineError::BoundPreconditionViolated(_))
    ));
}

#[test]
fn concurrent_compiles_agree() {
    let cat = fixture("synthetic_43");
    let cfg = PipelineConfig::for_profile(Profile::Aggressive);
    let expected = run(&cat, &cfg).0;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| run(&cat, &cfg).0)).collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), expected);
        }
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn compiling_is_deterministic(cat in common::catalog(6), p in profile()) {
        let cfg = PipelineConfig::for_profile(p);
        let (a, ra) = run(&cat, &cfg);
        let (b, rb) = run(&cat, &cfg);
        prop_assert_eq!(a, b);
        prop_assert_eq!(ra.to_json_pretty(), rb.to_json_pretty());
    }

    #[test]
    fn ops_applied_follow_the_fixed_order(cat in common::catalog(6), p in profile(), on in op_set(), off in op_set()) {
        let mut cfg = PipelineConfig::for_profile(p);
        cfg.enable = on.into_iter().collect();
        cfg.disable = off.iter().copied().collect();
        let (_, r) = run(&cat, &cfg);
        let mut order = Operator::ORDER.iter();
        for op in &r.ops_applied {
            prop_assert!(order.any(|o| o == op), "{:?} out of order", r.ops_applied);
            prop_assert!(!off.contains(op));
        }
    }

    #[test]
    fn per_operator_deltas_telescope(cat in common::catalog(6), p in profile()) {
        let (_, r) = run(&cat, &PipelineConfig::for_profile(p));
        let removed: i64 = r.per_op.iter().map(|d| d.tokens_removed).sum();
        prop_assert_eq!(removed, r.tokens_before as i64 - r.tokens_after as i64);
        prop_assert_eq!(r.per_op.len(), 9);
    }

    #[test]
    fn bound_holds_without_expansion(cat in common::catalog(6), p in profile()) {
        let (_, r) = run(&cat, &without_expansion(p));
        prop_assert!(check_bound(&r).unwrap(), "{} < {}", r.savings, r.bound_rhs);
    }

    #[test]
    fn compiled_text_round_trips(cat in common::catalog(6), p in profile(), constraint in prop::option::of("json|list\\[str\\]")) {
        let mut cfg = PipelineConfig::for_profile(p);
        cfg.constraint = constraint;
        let (text, _) = run(&cat, &cfg);
        let v = verify_superset(&cat, &text, FillerLexicon::shipped()).unwrap();
        prop_assert!(v.ok, "{:?}\n{text}", v.missing);
    }
}
