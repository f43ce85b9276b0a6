//! Brute-force checks over small universes: determinism, agreement of
//! serialization with the synchronous extension, determinism propagation and
//! replay of synchronous steps as asynchronous ones.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::combinators::{async_ext, nfold, normalized, star};
use super::serialize::serialize;
use super::strategy::{check_strategy, sync_ext, Strategy};
use super::{all_subsets, Redex, SetRelError, SetRelation};
use crate::term::TermSet;

/// True iff every subset of `universe` has at most one reduct under `r`.
/// Fails when the universe exceeds the relation's set-size cap.
pub fn is_deterministic<R: SetRelation>(r: &R, universe: &TermSet) -> Result<bool, SetRelError> {
    Ok(first_nondeterministic(r, universe)?.is_none())
}

/// A subset of `universe` with two or more reducts, if any.
pub fn first_nondeterministic<R: SetRelation>(
    r: &R,
    universe: &TermSet,
) -> Result<Option<TermSet>, SetRelError> {
    for a in all_subsets(universe, r.max_set_size())? {
        if r.step(&a)?.len() > 1 {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// A failed check: the input set and what went wrong on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub input: TermSet,
    pub detail: String,
}

/// Every serialization result must be a synchronous successor; an empty
/// selection must return the input unchanged.
pub fn check_soundness<R: SetRelation, S: Strategy>(
    r: &R,
    s: &S,
    a: &TermSet,
) -> Result<Option<Violation>, SetRelError> {
    let family = s.select(a)?;
    if let Err(e) = check_strategy(r, a, &family) {
        return Ok(Some(Violation {
            input: a.clone(),
            detail: format!("ill-formed strategy output: {e}"),
        }));
    }
    let got = serialize(r, s, a)?;
    if family.is_empty() {
        if got.len() != 1 || !got.contains(a) {
            return Ok(Some(Violation {
                input: a.clone(),
                detail: format!("empty selection but serialize gave {}", show(&got)),
            }));
        }
        return Ok(None);
    }
    let sync = sync_ext(r, s).step(a)?;
    for b in &got {
        if !sync.contains(b) {
            return Ok(Some(Violation {
                input: a.clone(),
                detail: format!("serialize gave {b}, not a sync successor of {}", show(&sync)),
            }));
        }
    }
    Ok(None)
}

/// Serialization must produce exactly the synchronous successors. With an
/// empty selection the two sides agree when serialization returns `{a}` and
/// there is no synchronous successor.
pub fn check_completeness<R: SetRelation, S: Strategy>(
    r: &R,
    s: &S,
    a: &TermSet,
) -> Result<Option<Violation>, SetRelError> {
    let got = serialize(r, s, a)?;
    let sync = sync_ext(r, s).step(a)?;
    let agree = if sync.is_empty() {
        s.select(a)?.is_empty() && got.len() == 1 && got.contains(a)
    } else {
        got == sync
    };
    Ok((!agree).then(|| Violation {
        input: a.clone(),
        detail: format!("serialize {} vs sync {}", show(&got), show(&sync)),
    }))
}

/// Names of the derived relations that fail to be deterministic on
/// `universe`: `nfold(r, n)` for `n ≤ max_n`, normalized reduction with the
/// given bound, and the synchronous extension under `s`.
pub fn determinism_propagation<R: SetRelation, S: Strategy>(
    r: &R,
    s: &S,
    universe: &TermSet,
    max_n: usize,
    bound: usize,
) -> Result<Vec<(String, TermSet)>, SetRelError> {
    let mut failures = Vec::new();
    for n in 0..=max_n {
        if let Some(a) = first_nondeterministic(&nfold(r, n), universe)? {
            failures.push((format!("nfold {n}"), a));
        }
    }
    if let Some(a) = first_nondeterministic(&normalized(r, bound), universe)? {
        failures.push((String::from("normalized"), a));
    }
    if let Some(a) = first_nondeterministic(&sync_ext(r, s), universe)? {
        failures.push((String::from("sync"), a));
    }
    Ok(failures)
}

/// Outcome of replaying synchronous steps as chains of asynchronous steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplayReport {
    /// Steps whose reducts do not touch the other selected redexes; these
    /// must be replayable.
    pub checked: usize,
    /// Steps where some reduct overlaps another selected redex.
    pub skipped: usize,
    pub failure: Option<Violation>,
}

/// For each synchronous step of `a` (one per reduct choice) check that the
/// result is reachable by at most `|s(a)|` asynchronous steps. Choices where a
/// reduct of one selected redex overlaps another selected redex are counted
/// but not checked, since idempotent union can merge such terms.
pub fn sync_in_async_star<R: SetRelation, S: Strategy>(
    r: &R,
    s: &S,
    a: &TermSet,
) -> Result<ReplayReport, SetRelError> {
    let mut report = ReplayReport::default();
    let family = s.select(a)?;
    if family.is_empty() {
        return Ok(report);
    }
    let removed: TermSet = family.iter().flat_map(|b| b.iter().cloned()).collect();
    let mut redexes = Vec::new();
    for b in &family {
        redexes.push(Redex {
            set: b.clone(),
            reducts: r.step(b)?,
        });
    }
    let reach = star(async_ext(r), family.len()).reach(a)?.value;
    for choice in choices(&redexes) {
        let clean = choice.iter().enumerate().all(|(i, b2)| {
            family
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !b2.intersects(b))
        });
        if !clean {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let added: TermSet = choice.iter().flat_map(|b| b.iter().cloned()).collect();
        let target = a.replace(&removed, &added);
        if !reach.contains(&target) && report.failure.is_none() {
            report.failure = Some(Violation {
                input: a.clone(),
                detail: format!("sync successor {target} not reachable asynchronously"),
            });
        }
    }
    Ok(report)
}

// One reduct per redex, in family order.
fn choices(redexes: &[Redex]) -> Vec<Vec<TermSet>> {
    let mut out: Vec<Vec<TermSet>> = alloc::vec![Vec::new()];
    for r in redexes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                r.reducts.iter().map(move |b2| {
                    let mut v = prefix.clone();
                    v.push(b2.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn show(sets: &BTreeSet<TermSet>) -> String {
    let items: Vec<String> = sets.iter().map(|s| format!("{s}")).collect();
    format!("[{}]", items.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_rules;
    use crate::setrel::strategy::{max_redexes, Uniform};
    use crate::setrel::nonempty_subsets;
    use crate::term::termset_of;

    fn ts(items: &[&str]) -> TermSet {
        termset_of(items.iter().copied()).unwrap()
    }

    fn rel(rules: &str) -> crate::rewrite::RewriteRelation {
        parse_rules(rules).unwrap().relation()
    }

    // Determinism by the definition over explicit pairs, bypassing the
    // subset enumerator.
    fn deterministic_by_pairs(r: &impl SetRelation, u: &TermSet) -> bool {
        let elems: Vec<_> = u.iter().cloned().collect();
        (0..1usize << elems.len()).all(|mask| {
            let a: TermSet = elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect();
            let out: Vec<_> = r.step(&a).unwrap().into_iter().collect();
            out.iter().all(|x| out.iter().all(|y| x == y))
        })
    }

    #[test]
    fn determinism_examples() {
        let u = ts(&["A(0)", "A(1)", "B(0)", "B(1)"]);
        let r = rel("r: A(x) -> B(x)");
        assert!(is_deterministic(&r, &u).unwrap());
        assert!(deterministic_by_pairs(&r, &u));

        let nd = rel("b: A(x) -> B(x)\nc: A(x) -> C(x)");
        assert!(!is_deterministic(&nd, &u).unwrap());
        assert!(!deterministic_by_pairs(&nd, &u));

        let empty = rel("");
        assert!(is_deterministic(&empty, &u).unwrap());
    }

    #[test]
    fn determinism_rejects_large_universe() {
        let r = rel("r: A(x) -> B(x)").with_limit(3);
        assert_eq!(
            is_deterministic(&r, &ts(&["A(0)", "A(1)", "A(2)", "A(3)"])),
            Err(SetRelError::TooLarge { size: 4, limit: 3 })
        );
    }

    #[test]
    fn soundness_and_completeness_on_examples() {
        let r = rel("r: A(x) -> B(x)\nq: B(x), C -> C");
        let u = ts(&["A(0)", "A(1)", "B(1)", "C"]);
        let s = max_redexes(&r, Uniform);
        assert!(is_deterministic(&r, &u).unwrap());
        for a in nonempty_subsets(&u, 12).unwrap() {
            assert_eq!(check_soundness(&r, &s, &a).unwrap(), None);
            assert_eq!(check_completeness(&r, &s, &a).unwrap(), None);
        }
    }

    #[test]
    fn propagation_holds_for_deterministic_relation() {
        let r = rel("r: A(x) -> B(x)\nq: B(x) -> C(x)\nm: A(0), B(1) -> C(0)");
        let u = ts(&["A(0)", "A(1)", "B(0)", "B(1)", "C(0)"]);
        assert!(is_deterministic(&r, &u).unwrap());
        let s = max_redexes(&r, Uniform);
        assert!(determinism_propagation(&r, &s, &u, 3, 8).unwrap().is_empty());
    }

    #[test]
    fn star_and_async_do_not_preserve_determinism() {
        let r = rel("r: A(x) -> B(x)\nq: B(x) -> C(x)");
        let a = ts(&["A(0)"]);
        assert!(is_deterministic(&r, &ts(&["A(0)", "B(0)", "C(0)"])).unwrap());
        let reach = star(&r, 4).step(&a).unwrap();
        assert!(reach.contains(&ts(&["B(0)"])) && reach.contains(&ts(&["C(0)"])));

        let u = ts(&["A(0)", "A(1)"]);
        assert!(!is_deterministic(&async_ext(&r), &u).unwrap());
    }

    #[test]
    fn sync_steps_replay_asynchronously() {
        let r = rel("r: A(x) -> B(x)\nq: B(x), C -> D");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["A(0)", "B(1)", "C"]);
        let rep = sync_in_async_star(&r, &s, &a).unwrap();
        assert_eq!(rep.failure, None);
        assert_eq!((rep.checked, rep.skipped), (1, 0));

        // A(1) -> B(1) would feed the other selected redex {B(1),C}
        let a = ts(&["A(0)", "A(1)", "B(1)", "C"]);
        let rep = sync_in_async_star(&r, &s, &a).unwrap();
        assert_eq!((rep.checked, rep.skipped), (0, 1));
    }

    #[test]
    fn idempotence_breaks_replay_when_reducts_overlap_other_redexes() {
        let r = rel("b1: A(0) -> B(0), X\nb2: B(0) -> A(0)");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["A(0)", "B(0)"]);
        let target = ts(&["A(0)", "B(0)", "X"]);
        assert_eq!(sync_ext(&r, &s).step(&a).unwrap(), [target.clone()].into());
        let reach = star(async_ext(&r), 10).reach(&a).unwrap();
        assert!(!reach.value.contains(&target));
        let rep = sync_in_async_star(&r, &s, &a).unwrap();
        assert_eq!((rep.checked, rep.skipped), (0, 1));
    }
}
