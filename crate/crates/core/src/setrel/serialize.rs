//! The log-book serialization procedure: reduce the selected redexes of a set
//! one at a time, accumulating reducts on a separate side of a pair, then
//! splice the accumulated reducts back into the set.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use super::strategy::Strategy;
use super::{SetRelError, SetRelation};
use crate::term::TermSet;

/// `⟨pending ; done⟩`. Pending redexes are kept as a family so each is
/// reduced as a unit; `done` is the union of the reducts produced so far.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LogBook {
    pub pending: Vec<TermSet>,
    pub done: TermSet,
}

impl LogBook {
    pub fn start(family: Vec<TermSet>) -> Self {
        LogBook {
            pending: family,
            done: TermSet::new(),
        }
    }

    pub fn is_final(&self) -> bool {
        self.pending.is_empty()
    }

    /// Union of the pending redexes.
    pub fn pending_terms(&self) -> TermSet {
        self.pending.iter().flat_map(|b| b.iter().cloned()).collect()
    }

    /// Whether no pending term also occurs among the accumulated reducts.
    pub fn is_disjoint(&self) -> bool {
        self.pending.iter().all(|b| !b.intersects(&self.done))
    }

    /// `⟨aᵢ,c ; d⟩ → ⟨c ; a′ᵢ,d⟩` for every pending `aᵢ` and reduct `a′ᵢ`.
    pub fn steps<R: SetRelation>(&self, r: &R) -> Result<BTreeSet<LogBook>, SetRelError> {
        let mut out = BTreeSet::new();
        for (i, b) in self.pending.iter().enumerate() {
            let reducts = r.step(b)?;
            if reducts.is_empty() {
                return Err(SetRelError::NotARedex(b.clone()));
            }
            let mut rest = self.pending.clone();
            rest.remove(i);
            for b2 in reducts {
                out.insert(LogBook {
                    pending: rest.clone(),
                    done: self.done.union(&b2),
                });
            }
        }
        Ok(out)
    }
}

impl fmt::Display for LogBook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, b) in self.pending.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, " ; {}>", self.done)
    }
}

/// Every result of the procedure on `a`, over all orders and reduct choices.
/// An empty selection yields `{a}`.
pub fn serialize<R: SetRelation, S: Strategy>(
    r: &R,
    s: &S,
    a: &TermSet,
) -> Result<BTreeSet<TermSet>, SetRelError> {
    let family = s.select(a)?;
    let start = LogBook::start(family);
    let selected = start.pending_terms();
    let rest = a.difference(&selected);

    let mut results = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![start];
    while let Some(book) = stack.pop() {
        if !seen.insert(book.clone()) {
            continue;
        }
        if book.is_final() {
            results.insert(rest.union(&book.done));
            continue;
        }
        stack.extend(book.steps(r)?);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::rewrite::parse_rules;
    use crate::setrel::strategy::{max_redexes, sync_ext, Uniform};
    use crate::setrel::nonempty_subsets;
    use crate::term::termset_of;

    fn ts(items: &[&str]) -> TermSet {
        termset_of(items.iter().copied()).unwrap()
    }

    fn rel(rules: &str) -> crate::rewrite::RewriteRelation {
        parse_rules(rules).unwrap().relation()
    }

    #[test]
    fn worked_example() {
        let r = rel("r: A(x) -> B(x)");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["A(0)", "A(1)", "B(1)"]);
        assert_eq!(serialize(&r, &s, &a).unwrap(), [ts(&["B(0)", "B(1)"])].into());
    }

    #[test]
    fn empty_selection_returns_input() {
        let r = rel("r: A(x) -> B(x)");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["B(0)"]);
        assert_eq!(serialize(&r, &s, &a).unwrap(), [a].into());
    }

    #[test]
    fn nondeterministic_results_are_sync_steps() {
        let r = rel("b: A(x) -> B(x)\nc: A(x) -> C(x)");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["A(0)", "A(1)"]);
        let got = serialize(&r, &s, &a).unwrap();
        assert_eq!(got.len(), 4);
        assert_eq!(got, sync_ext(&r, &s).step(&a).unwrap());
    }

    #[test]
    fn log_book_steps() {
        let r = rel("r: A(x) -> B(x)");
        let book = LogBook::start(alloc::vec![ts(&["A(0)"]), ts(&["A(1)"])]);
        assert_eq!(book.to_string(), "<{A(0)},{A(1)} ; {}>");
        let next: Vec<_> = book.steps(&r).unwrap().into_iter().collect();
        assert_eq!(next.len(), 2);
        assert!(next.iter().all(LogBook::is_disjoint));
    }

    #[test]
    fn pending_and_done_can_overlap() {
        // A reduct can reintroduce a term that another pending redex still
        // holds; sets do not keep the two copies apart.
        let r = rel("a: A(0) -> B(0)\nb: B(0) -> C(0)");
        let s = max_redexes(&r, Uniform);
        let a = ts(&["A(0)", "B(0)"]);
        let start = LogBook::start(s.select(&a).unwrap());
        assert!(start.is_disjoint());
        let overlapping = start.steps(&r).unwrap().into_iter().any(|b| !b.is_disjoint());
        assert!(overlapping);
        // the result is unaffected since reduction works on the pending copy
        assert_eq!(serialize(&r, &s, &a).unwrap(), [ts(&["B(0)", "C(0)"])].into());
    }

    #[test]
    fn agrees_with_sync_on_small_universe() {
        let r = rel("one: A(x) -> B(x)\npair: A(x), B(x) -> C(x)\nc: C(x) -> A(x), B(0)");
        let u = ts(&["A(0)", "A(1)", "B(0)", "B(1)", "C(1)"]);
        let p = |s: &TermSet| s.len() as u64;
        let s = max_redexes(&r, p);
        let sync = sync_ext(&r, &s);
        for a in nonempty_subsets(&u, 12).unwrap() {
            let got = serialize(&r, &s, &a).unwrap();
            let want = sync.step(&a).unwrap();
            if want.is_empty() {
                assert_eq!(got, [a.clone()].into());
            } else {
                assert_eq!(got, want, "on {a}");
            }
        }
    }
}
