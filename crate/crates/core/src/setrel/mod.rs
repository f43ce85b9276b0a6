//! Relations on finite term sets and the operations that build synchronous
//! relations from asynchronous ones.
//!
//! A [`SetRelation`] exposes two enumerators: `step` (all reducts of a whole
//! set) and `redexes` (every nonempty subset of a set that has a reduct,
//! paired with its reducts). The combinators in [`combinators`] and
//! [`strategy`] are themselves relations, so they compose freely.
//!
//! Everything here enumerates explicitly and is exponential in set size. A
//! per-relation cap ([`SetRelation::max_set_size`]) turns runaway inputs into
//! [`SetRelError::TooLarge`] instead of a hang.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::term::TermSet;

pub mod combinators;
pub mod oracle;
pub mod serialize;
pub mod strategy;

pub use combinators::{
    async_ext, identity_rel, nfold, normalize, normalized, parallel_ext, star, AsyncExt, Bounded,
    Identity, NFold, Normalized, ParallelExt, Star,
};
pub use oracle::is_deterministic;
pub use serialize::{serialize, LogBook};
pub use strategy::{
    check_strategy, max_redexes, sync_ext, MaxRedexes, Priority, Strategy, SyncExt, Uniform,
};

/// Largest set whose subsets are enumerated.
pub const DEFAULT_MAX_SET_SIZE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SetRelError {
    #[error("set of size {size} exceeds the enumeration limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("strategy selected {0} which is not a redex")]
    NotARedex(TermSet),
    #[error("strategy selected overlapping or empty subsets of {0}")]
    IllFormedStrategy(TermSet),
}

/// A nonempty subset of some set together with all its reducts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Redex {
    pub set: TermSet,
    pub reducts: BTreeSet<TermSet>,
}

/// An enumerable binary relation on finite term sets.
pub trait SetRelation {
    /// Every `a'` with `a → a'`.
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError>;

    /// Every nonempty `b ⊆ u` that is a redex, with its reducts, in
    /// canonical order.
    fn redexes(&self, u: &TermSet) -> Result<Vec<Redex>, SetRelError> {
        let mut out = Vec::new();
        for b in nonempty_subsets(u, self.max_set_size())? {
            let reducts = self.step(&b)?;
            if !reducts.is_empty() {
                out.push(Redex { set: b, reducts });
            }
        }
        out.sort();
        Ok(out)
    }

    fn relates(&self, a: &TermSet, b: &TermSet) -> Result<bool, SetRelError> {
        Ok(self.step(a)?.contains(b))
    }

    fn is_redex(&self, a: &TermSet) -> Result<bool, SetRelError> {
        Ok(!self.step(a)?.is_empty())
    }

    fn max_set_size(&self) -> usize {
        DEFAULT_MAX_SET_SIZE
    }
}

impl<R: SetRelation + ?Sized> SetRelation for &R {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        (**self).step(a)
    }

    fn redexes(&self, u: &TermSet) -> Result<Vec<Redex>, SetRelError> {
        (**self).redexes(u)
    }

    fn max_set_size(&self) -> usize {
        (**self).max_set_size()
    }
}

impl<R: SetRelation + ?Sized> SetRelation for alloc::boxed::Box<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        (**self).step(a)
    }

    fn redexes(&self, u: &TermSet) -> Result<Vec<Redex>, SetRelError> {
        (**self).redexes(u)
    }

    fn max_set_size(&self) -> usize {
        (**self).max_set_size()
    }
}

/// A relation given by a step function; redexes come from the default
/// subset enumeration.
pub struct FnRelation<F> {
    step: F,
    limit: usize,
}

impl<F> FnRelation<F>
where
    F: Fn(&TermSet) -> BTreeSet<TermSet>,
{
    pub fn new(step: F) -> Self {
        FnRelation {
            step,
            limit: DEFAULT_MAX_SET_SIZE,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }
}

impl<F> SetRelation for FnRelation<F>
where
    F: Fn(&TermSet) -> BTreeSet<TermSet>,
{
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        Ok((self.step)(a))
    }

    fn max_set_size(&self) -> usize {
        self.limit
    }
}

/// All nonempty subsets of `u`, in mask order. Fails above `limit` elements.
pub fn nonempty_subsets(u: &TermSet, limit: usize) -> Result<Vec<TermSet>, SetRelError> {
    Ok(all_subsets(u, limit)?.into_iter().skip(1).collect())
}

/// All subsets of `u` including the empty set (first).
pub fn all_subsets(u: &TermSet, limit: usize) -> Result<Vec<TermSet>, SetRelError> {
    if u.len() > limit || u.len() >= usize::BITS as usize {
        return Err(SetRelError::TooLarge {
            size: u.len(),
            limit,
        });
    }
    let elems: Vec<_> = u.iter().collect();
    let n = elems.len();
    Ok((0usize..(1 << n))
        .map(|mask| {
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| (*t).clone())
                .collect()
        })
        .collect())
}
