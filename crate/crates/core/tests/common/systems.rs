//! Random rule systems over `{A,B,C} × {0,1}` as structured values that
//! render to rule-file text, with a textual instantiation oracle.

use proptest::prelude::*;
use syncrel_core::rewrite::parse_rules;
use syncrel_core::term::parse_termset;
use syncrel_core::{RewriteRelation, TermSet};

pub const HEADS: [&str; 3] = ["A", "B", "C"];

#[derive(Clone, Debug)]
pub struct Pat {
    head: usize,
    /// `None` is the variable `x`.
    arg: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Rule {
    lhs: Vec<Pat>,
    rhs: Vec<Pat>,
}

#[derive(Clone, Debug)]
pub struct System(pub Vec<Rule>);

fn render(ps: &[Pat], x: Option<i64>) -> String {
    let items: Vec<String> = ps
        .iter()
        .map(|p| {
            let arg = match (p.arg, x) {
                (Some(k), _) => k.to_string(),
                (None, Some(k)) => k.to_string(),
                (None, None) => "x".into(),
            };
            format!("{}({arg})", HEADS[p.head])
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

impl System {
    pub fn max_lhs(&self) -> usize {
        self.0.iter().map(|r| r.lhs.len()).max().unwrap_or(0)
    }

    pub fn text(&self) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(i, r)| format!("r{i} : {} -> {}\n", render(&r.lhs, None), render(&r.rhs, None)))
            .collect()
    }

    pub fn relation(&self) -> RewriteRelation {
        parse_rules(&self.text()).expect("generated system parses").relation()
    }

    /// Successors of `u` by instantiating `x` with each value and comparing
    /// the ground left-hand side with `u` as text-parsed sets.
    pub fn brute_step(&self, u: &TermSet) -> std::collections::BTreeSet<TermSet> {
        let mut out = std::collections::BTreeSet::new();
        for r in &self.0 {
            for k in [0, 1] {
                let lhs = parse_termset(&render(&r.lhs, Some(k))).unwrap();
                if lhs == *u {
                    out.insert(parse_termset(&render(&r.rhs, Some(k))).unwrap());
                }
            }
        }
        out
    }
}

fn pat(allow_var: bool) -> impl Strategy<Value = Pat> {
    let arg = if allow_var {
        prop_oneof![Just(None), (0..2i64).prop_map(Some)].boxed()
    } else {
        (0..2i64).prop_map(Some).boxed()
    };
    (0..HEADS.len(), arg).prop_map(|(head, arg)| Pat { head, arg })
}

fn rule() -> impl Strategy<Value = Rule> {
    proptest::collection::vec(pat(true), 1..=2).prop_flat_map(|lhs| {
        let bound = lhs.iter().any(|p| p.arg.is_none());
        proptest::collection::vec(pat(bound), 0..=2).prop_map(move |rhs| Rule { lhs: lhs.clone(), rhs })
    })
}

pub fn system() -> impl Strategy<Value = System> {
    proptest::collection::vec(rule(), 1..=4).prop_map(System)
}

/// Per-term weights; the priority of a set is their sum.
pub fn weights() -> impl Strategy<Value = Vec<u64>> {
    prop_oneof![Just(vec![0; 6]), proptest::collection::vec(0..4u64, 6)]
}

pub fn universe() -> TermSet {
    parse_termset("{A(0), A(1), B(0), B(1), C(0), C(1)}").unwrap()
}

pub fn subset() -> impl Strategy<Value = TermSet> {
    proptest::sample::subsequence(universe().iter().cloned().collect::<Vec<_>>(), 0..=6)
        .prop_map(|v| v.into_iter().collect())
}
