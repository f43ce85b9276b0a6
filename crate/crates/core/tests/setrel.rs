#[allow(dead_code)]
#[path = "common/systems.rs"]
mod systems;

use std::collections::BTreeMap;

use proptest::prelude::*;
use syncrel_core::rewrite::parse_rules;
use syncrel_core::setrel::oracle::{
    check_completeness, check_soundness, determinism_propagation, first_nondeterministic, sync_in_async_star,
};
use syncrel_core::setrel::{
    all_subsets, async_ext, check_strategy, is_deterministic, max_redexes, nonempty_subsets, star, sync_ext,
    SetRelation, Strategy as _,
};
use syncrel_core::term::parse_termset;
use syncrel_core::{Term, TermSet};
use systems::{subset, system, universe, weights};

fn priority(w: Vec<u64>) -> impl Fn(&TermSet) -> u64 + Clone {
    let table: BTreeMap<Term, u64> = universe().iter().cloned().zip(w).collect();
    move |s: &TermSet| s.iter().map(|t| table.get(t).copied().unwrap_or(0)).sum()
}

fn set(s: &str) -> TermSet {
    parse_termset(s).unwrap()
}

#[test]
fn closure_and_async_lose_determinism() {
    let rel = parse_rules("r : A(x) -> B(x)\ns : B(x) -> C(x)").unwrap().relation();
    assert!(is_deterministic(&rel, &universe()).unwrap());
    let reach = star(&rel, 8).step(&set("{A(0)}")).unwrap();
    assert!(reach.contains(&set("{B(0)}")) && reach.contains(&set("{C(0)}")));
    assert!(first_nondeterministic(&async_ext(&rel), &set("{A(0), A(1)}")).unwrap().is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_is_sound(sys in system(), w in weights()) {
        let rel = sys.relation();
        let s = max_redexes(&rel, priority(w));
        for a in all_subsets(&universe(), 12).unwrap() {
            let v = check_soundness(&rel, &s, &a).unwrap();
            prop_assert!(v.is_none(), "{}{:?}", sys.text(), v);
        }
    }

    #[test]
    fn serialization_is_complete_for_deterministic_systems(sys in system(), w in weights()) {
        let rel = sys.relation();
        prop_assume!(is_deterministic(&rel, &universe()).unwrap());
        let s = max_redexes(&rel, priority(w));
        for a in all_subsets(&universe(), 12).unwrap() {
            let v = check_completeness(&rel, &s, &a).unwrap();
            prop_assert!(v.is_none(), "{}{:?}", sys.text(), v);
        }
    }

    #[test]
    fn determinism_propagates(sys in system(), w in weights()) {
        let rel = sys.relation();
        prop_assume!(is_deterministic(&rel, &universe()).unwrap());
        let s = max_redexes(&rel, priority(w));
        let failures = determinism_propagation(&rel, &s, &universe(), 3, 16).unwrap();
        prop_assert!(failures.is_empty(), "{}{:?}", sys.text(), failures);
    }

    // Checked against the definition: b is selected iff it is a redex and
    // strictly beats every overlapping redex.
    #[test]
    fn max_redexes_follows_its_definition(sys in system(), w in weights(), a in subset()) {
        let rel = sys.relation();
        let p = priority(w);
        let family = max_redexes(&rel, p.clone()).select(&a).unwrap();
        prop_assert!(check_strategy(&rel, &a, &family).is_ok());
        let redexes: Vec<TermSet> = nonempty_subsets(&a, 12)
            .unwrap()
            .into_iter()
            .filter(|b| !sys.brute_step(b).is_empty())
            .collect();
        let expected: Vec<TermSet> = redexes
            .iter()
            .filter(|b| {
                redexes.iter().all(|c| c == *b || b.iter().all(|t| !c.contains(t)) || p(b) > p(c))
            })
            .cloned()
            .collect();
        let mut got = family.clone();
        got.sort();
        let mut want = expected;
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn sync_steps_replay_as_async_chains(sys in system(), w in weights(), a in subset()) {
        let rel = sys.relation();
        let s = max_redexes(&rel, priority(w));
        let report = sync_in_async_star(&rel, &s, &a).unwrap();
        prop_assert!(report.failure.is_none(), "{}{:?}", sys.text(), report.failure);
    }

    #[test]
    fn sync_successors_rewrite_exactly_the_selection(sys in system(), w in weights(), a in subset()) {
        let rel = sys.relation();
        let s = max_redexes(&rel, priority(w));
        let family = s.select(&a).unwrap();
        let succ = sync_ext(&rel, &s).step(&a).unwrap();
        if family.is_empty() {
            prop_assert!(succ.is_empty());
        } else {
            let untouched = family.iter().fold(a.clone(), |acc, b| acc.difference(b));
            for b in &succ {
                prop_assert!(untouched.is_subset(b));
            }
            prop_assert!(!succ.is_empty());
        }
    }
}
