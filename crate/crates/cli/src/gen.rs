//! Seeded random rule systems over a small universe.
//!
//! Terms are `H(k)` for `H` in `A, B, C` and `k` in `0, 1`, so every
//! universe has six terms and 64 subsets. Rules have one or two patterns
//! on each side (the right side may be empty) and may use the variable `x`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syncrel_core::rewrite::{Pattern, RewriteRule, RewriteSystem};
use syncrel_core::setrel::Priority;
use syncrel_core::{Term, TermSet};

const HEADS: [&str; 3] = ["A", "B", "C"];
const ARGS: [i64; 2] = [0, 1];
const MAX_RULES: usize = 4;

/// Priority of a set: the sum of per-term weights.
#[derive(Clone, Debug, Default)]
pub struct Weights(pub BTreeMap<Term, u64>);

impl Priority for Weights {
    fn priority(&self, set: &TermSet) -> u64 {
        set.iter().map(|t| self.0.get(t).copied().unwrap_or(0)).sum()
    }
}

impl std::fmt::Display for Weights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.values().all(|w| *w == 0) {
            return f.write_str("uniform");
        }
        let parts: Vec<String> = self.0.iter().map(|(t, w)| format!("{t}:{w}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub system: RewriteSystem,
    pub universe: TermSet,
    pub weights: Weights,
}

pub fn universe() -> TermSet {
    HEADS
        .iter()
        .flat_map(|h| ARGS.iter().map(move |k| Term::app(*h, [Term::Int(*k)])))
        .collect()
}

/// Deterministic stream of cases for a seed.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pattern(&mut self, allow_var: bool) -> Pattern {
        let head = HEADS[self.rng.random_range(0..HEADS.len())];
        let arg = if allow_var && self.rng.random_bool(0.4) {
            Pattern::var("x")
        } else {
            Pattern::Int(ARGS[self.rng.random_range(0..ARGS.len())])
        };
        Pattern::app(head, [arg])
    }

    fn rule(&mut self, label: String) -> RewriteRule {
        let nl = self.rng.random_range(1..=2);
        let lhs: Vec<Pattern> = (0..nl).map(|_| self.pattern(true)).collect();
        let has_var = lhs
            .iter()
            .any(|p| matches!(p, Pattern::App { args, .. } if args.iter().any(|a| matches!(a, Pattern::Var(_)))));
        let nr = self.rng.random_range(0..=2);
        let rhs: Vec<Pattern> = (0..nr).map(|_| self.pattern(has_var)).collect();
        RewriteRule::new(label, lhs, rhs).expect("generated rules are well-formed")
    }

    pub fn next_case(&mut self) -> Case {
        let n = self.rng.random_range(1..=MAX_RULES);
        let rules: Vec<RewriteRule> = (0..n).map(|i| self.rule(format!("r{}", i + 1))).collect();
        let system = RewriteSystem::new(rules).expect("generated systems are well-formed");
        let universe = universe();
        let uniform = self.rng.random_bool(0.3);
        let weights = universe
            .iter()
            .map(|t| (t.clone(), if uniform { 0 } else { self.rng.random_range(0..4) }))
            .collect();
        Case {
            system,
            universe,
            weights: Weights(weights),
        }
    }
}
