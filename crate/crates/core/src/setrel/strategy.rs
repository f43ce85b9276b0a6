//! Strategies, priorities, the maximal-redexes strategy and the synchronous
//! extension of a relation.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::combinators::reduct_choices;
use super::{Redex, SetRelError, SetRelation};
use crate::term::TermSet;

/// Maps a set to a natural-number priority.
pub trait Priority {
    fn priority(&self, set: &TermSet) -> u64;
}

/// Every set has priority 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uniform;

impl Priority for Uniform {
    fn priority(&self, _: &TermSet) -> u64 {
        0
    }
}

impl<F: Fn(&TermSet) -> u64> Priority for F {
    fn priority(&self, set: &TermSet) -> u64 {
        self(set)
    }
}

/// Selects the redexes of a set that are reduced together. A well-formed
/// selection is a family of nonempty, pairwise disjoint redexes, returned in
/// canonical order; the empty family is allowed.
pub trait Strategy {
    fn select(&self, a: &TermSet) -> Result<Vec<TermSet>, SetRelError>;
}

impl<S: Strategy + ?Sized> Strategy for &S {
    fn select(&self, a: &TermSet) -> Result<Vec<TermSet>, SetRelError> {
        (**self).select(a)
    }
}

/// The maximal-redexes strategy: `b` is selected iff it is a redex of `a`
/// and every other redex `c` of `a` overlapping `b` has `p(b) > p(c)`.
#[derive(Clone, Debug)]
pub struct MaxRedexes<R, P> {
    relation: R,
    priority: P,
}

pub fn max_redexes<R: SetRelation, P: Priority>(r: R, p: P) -> MaxRedexes<R, P> {
    MaxRedexes {
        relation: r,
        priority: p,
    }
}

impl<R: SetRelation, P: Priority> MaxRedexes<R, P> {
    pub fn relation(&self) -> &R {
        &self.relation
    }

    pub fn priority(&self) -> &P {
        &self.priority
    }
}

/// Maximal redexes among an explicit redex list.
pub(crate) fn maximal<'a, P: Priority>(redexes: &'a [Redex], p: &P) -> Vec<&'a Redex> {
    let prio: Vec<u64> = redexes.iter().map(|r| p.priority(&r.set)).collect();
    redexes
        .iter()
        .enumerate()
        .filter(|(i, b)| {
            redexes.iter().enumerate().all(|(j, c)| {
                j == *i || !c.set.intersects(&b.set) || prio[*i] > prio[j]
            })
        })
        .map(|(_, b)| b)
        .collect()
}

impl<R: SetRelation, P: Priority> Strategy for MaxRedexes<R, P> {
    fn select(&self, a: &TermSet) -> Result<Vec<TermSet>, SetRelError> {
        let redexes = self.relation.redexes(a)?;
        Ok(maximal(&redexes, &self.priority)
            .into_iter()
            .map(|r| r.set.clone())
            .collect())
    }
}

/// Check that `family` is a valid strategy output for `a` under `r`.
pub fn check_strategy<R: SetRelation>(
    r: &R,
    a: &TermSet,
    family: &[TermSet],
) -> Result<(), SetRelError> {
    let mut seen = TermSet::new();
    for b in family {
        if b.is_empty() || !b.is_subset(a) || b.intersects(&seen) {
            return Err(SetRelError::IllFormedStrategy(a.clone()));
        }
        if !r.is_redex(b)? {
            return Err(SetRelError::NotARedex(b.clone()));
        }
        seen = seen.union(b);
    }
    Ok(())
}

/// `a →ₛ a'` iff `s(a) = {b₁..bₙ}`, `bᵢ → b'ᵢ` and
/// `a' = (a \ ⋃bᵢ) ∪ ⋃b'ᵢ`. An empty selection yields no successor.
///
/// Computed by direct enumeration; this is the reference the serialization
/// procedure is checked against.
#[derive(Clone, Debug)]
pub struct SyncExt<R, S> {
    relation: R,
    strategy: S,
}

pub fn sync_ext<R: SetRelation, S: Strategy>(r: R, s: S) -> SyncExt<R, S> {
    SyncExt {
        relation: r,
        strategy: s,
    }
}

impl<R: SetRelation, S: Strategy> SyncExt<R, S> {
    pub fn relation(&self) -> &R {
        &self.relation
    }

    pub fn strategy(&self) -> &S {
        &self.strategy
    }
}

impl<R: SetRelation, S: Strategy> SetRelation for SyncExt<R, S> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        let family = self.strategy.select(a)?;
        if family.is_empty() {
            return Ok(BTreeSet::new());
        }
        let mut redexes = Vec::with_capacity(family.len());
        for b in family {
            let reducts = self.relation.step(&b)?;
            if reducts.is_empty() {
                return Err(SetRelError::NotARedex(b));
            }
            redexes.push(Redex { set: b, reducts });
        }
        let removed: TermSet = redexes.iter().flat_map(|r| r.set.iter().cloned()).collect();
        let refs: Vec<&Redex> = redexes.iter().collect();
        Ok(reduct_choices(&refs)
            .into_iter()
            .map(|added| a.replace(&removed, &added))
            .collect())
    }

    fn max_set_size(&self) -> usize {
        self.relation.max_set_size()
    }
}
