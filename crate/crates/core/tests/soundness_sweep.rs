//! Every applicable checker holds on every canonical subset of [0, 14] with
//! 2 to 5 elements.

use dilates::bounds::{check_suite, StatementId, Verdict};
use dilates::search::enumerate_canonical;

#[test]
fn check_suite_never_fails_on_small_canonical_sets() {
    let mut applicable = 0usize;
    let mut seen = std::collections::BTreeSet::new();
    for n in 2..=5 {
        for a in enumerate_canonical(n, 14, false).unwrap() {
            for k in [3, 5, 7] {
                for r in check_suite(&a, k).unwrap() {
                    assert_ne!(r.verdict, Verdict::Fails, "counterexample on {a}, k={k}: {r:#?}");
                    if r.verdict == Verdict::Holds {
                        applicable += 1;
                        seen.insert(r.statement_id);
                    }
                }
            }
        }
    }
    assert!(applicable > 10_000);
    for id in [
        StatementId::ComponentCount,
        StatementId::FourBound,
        StatementId::FullSemiFull,
        StatementId::MarginalTotal,
        StatementId::Faithful,
        StatementId::GeneralLower,
    ] {
        assert!(seen.contains(&id), "{id} never applicable in the sweep");
    }
}
