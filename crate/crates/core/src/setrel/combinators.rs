//! Identity, n-fold composition, bounded reflexive-transitive closure,
//! normalized reduction, and the asynchronous and parallel extensions.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Redex, SetRelError, SetRelation};
use crate::term::TermSet;

/// A result computed under a step bound. `cutoff` is set when chains longer
/// than the bound exist, so an absent element may still be reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounded<T> {
    pub value: T,
    pub cutoff: bool,
}

/// `a →⁰ a`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

pub fn identity_rel() -> Identity {
    Identity
}

impl SetRelation for Identity {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        Ok([a.clone()].into())
    }
}

/// Exactly `n` steps of the inner relation.
#[derive(Clone, Debug)]
pub struct NFold<R> {
    inner: R,
    n: usize,
}

pub fn nfold<R: SetRelation>(r: R, n: usize) -> NFold<R> {
    NFold { inner: r, n }
}

fn successors_of_layer<R: SetRelation>(
    r: &R,
    layer: &BTreeSet<TermSet>,
) -> Result<BTreeSet<TermSet>, SetRelError> {
    let mut next = BTreeSet::new();
    for a in layer {
        next.extend(r.step(a)?);
    }
    Ok(next)
}

impl<R: SetRelation> SetRelation for NFold<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        let mut layer: BTreeSet<TermSet> = [a.clone()].into();
        for _ in 0..self.n {
            if layer.is_empty() {
                break;
            }
            layer = successors_of_layer(&self.inner, &layer)?;
        }
        Ok(layer)
    }

    fn max_set_size(&self) -> usize {
        self.inner.max_set_size()
    }
}

/// Reachability in at most `bound` steps.
#[derive(Clone, Debug)]
pub struct Star<R> {
    inner: R,
    bound: usize,
}

pub fn star<R: SetRelation>(r: R, bound: usize) -> Star<R> {
    Star { inner: r, bound }
}

impl<R: SetRelation> Star<R> {
    /// Sets reachable from `a` in `0..=bound` steps, with the cutoff flag.
    pub fn reach(&self, a: &TermSet) -> Result<Bounded<BTreeSet<TermSet>>, SetRelError> {
        let (seen, last) = self.layers(a)?;
        let cutoff = last_layer_extends(&self.inner, &last)?;
        Ok(Bounded {
            value: seen,
            cutoff,
        })
    }

    // Returns every set visited and the layer reached in exactly `bound`
    // steps.
    fn layers(
        &self,
        a: &TermSet,
    ) -> Result<(BTreeSet<TermSet>, BTreeSet<TermSet>), SetRelError> {
        let mut seen: BTreeSet<TermSet> = [a.clone()].into();
        let mut layer = seen.clone();
        for _ in 0..self.bound {
            if layer.is_empty() {
                break;
            }
            layer = successors_of_layer(&self.inner, &layer)?;
            seen.extend(layer.iter().cloned());
        }
        Ok((seen, layer))
    }
}

fn last_layer_extends<R: SetRelation>(
    r: &R,
    layer: &BTreeSet<TermSet>,
) -> Result<bool, SetRelError> {
    for b in layer {
        if r.is_redex(b)? {
            return Ok(true);
        }
    }
    Ok(false)
}

impl<R: SetRelation> SetRelation for Star<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        Ok(self.reach(a)?.value)
    }

    fn max_set_size(&self) -> usize {
        self.inner.max_set_size()
    }
}

/// Normalized reduction `→↓` under a step bound.
#[derive(Clone, Debug)]
pub struct Normalized<R> {
    inner: R,
    bound: usize,
}

pub fn normalized<R: SetRelation>(r: R, bound: usize) -> Normalized<R> {
    Normalized { inner: r, bound }
}

/// Normal forms reachable from `a` within `bound` steps.
pub fn normalize<R: SetRelation>(
    r: R,
    a: &TermSet,
    bound: usize,
) -> Result<Bounded<BTreeSet<TermSet>>, SetRelError> {
    normalized(r, bound).normal_forms(a)
}

impl<R: SetRelation> Normalized<R> {
    pub fn normal_forms(&self, a: &TermSet) -> Result<Bounded<BTreeSet<TermSet>>, SetRelError> {
        let closure = Star {
            inner: &self.inner,
            bound: self.bound,
        };
        let (seen, last) = closure.layers(a)?;
        let mut value = BTreeSet::new();
        for b in seen {
            if !self.inner.is_redex(&b)? {
                value.insert(b);
            }
        }
        Ok(Bounded {
            value,
            cutoff: last_layer_extends(&self.inner, &last)?,
        })
    }
}

impl<R: SetRelation> SetRelation for Normalized<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        Ok(self.normal_forms(a)?.value)
    }

    fn max_set_size(&self) -> usize {
        self.inner.max_set_size()
    }
}

/// Congruence closure: rewrite one nonempty redex inside the set.
#[derive(Clone, Debug)]
pub struct AsyncExt<R> {
    inner: R,
}

pub fn async_ext<R: SetRelation>(r: R) -> AsyncExt<R> {
    AsyncExt { inner: r }
}

impl<R: SetRelation> SetRelation for AsyncExt<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        let mut out = BTreeSet::new();
        for Redex { set, reducts } in self.inner.redexes(a)? {
            for b in &reducts {
                out.insert(a.replace(&set, b));
            }
        }
        Ok(out)
    }

    fn max_set_size(&self) -> usize {
        self.inner.max_set_size()
    }
}

/// Parallel closure: rewrite any nonempty family of pairwise-disjoint
/// redexes at once.
#[derive(Clone, Debug)]
pub struct ParallelExt<R> {
    inner: R,
}

pub fn parallel_ext<R: SetRelation>(r: R) -> ParallelExt<R> {
    ParallelExt { inner: r }
}

/// Every way of picking one reduct per redex, unioned.
pub(crate) fn reduct_choices(family: &[&Redex]) -> BTreeSet<TermSet> {
    let mut acc: BTreeSet<TermSet> = [TermSet::new()].into();
    for r in family {
        let mut next = BTreeSet::new();
        for partial in &acc {
            for b in &r.reducts {
                next.insert(partial.union(b));
            }
        }
        acc = next;
    }
    acc
}

impl<R: SetRelation> SetRelation for ParallelExt<R> {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        let redexes = self.inner.redexes(a)?;
        let mut out = BTreeSet::new();
        let mut family: Vec<&Redex> = Vec::new();
        disjoint_families(&redexes, 0, &mut family, &mut |fam| {
            let removed: TermSet = fam.iter().flat_map(|r| r.set.iter().cloned()).collect();
            for added in reduct_choices(fam) {
                out.insert(a.replace(&removed, &added));
            }
        });
        Ok(out)
    }

    fn max_set_size(&self) -> usize {
        self.inner.max_set_size()
    }
}

fn disjoint_families<'a>(
    redexes: &'a [Redex],
    from: usize,
    family: &mut Vec<&'a Redex>,
    visit: &mut dyn FnMut(&[&'a Redex]),
) {
    if !family.is_empty() {
        visit(family);
    }
    for i in from..redexes.len() {
        if family.iter().all(|r| !r.set.intersects(&redexes[i].set)) {
            family.push(&redexes[i]);
            disjoint_families(redexes, i + 1, family, visit);
            family.pop();
        }
    }
}
