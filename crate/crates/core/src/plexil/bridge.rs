//! The atomic relation seen as a relation on term sets.
//!
//! A state `π` is encoded as one term per object: `Node(id, status, outcome)`
//! and `Var(id, value)`. Γ is fixed during a micro step and not encoded.
//! A redex is `{N} ∪ S` where node `N` has an atomic transition in the
//! pre-state and `S` is a subset of the variable terms that transition
//! writes. Its reduct is the node term after the transition plus the
//! written values of `S`. The micro step should then be exactly one step
//! of the synchronous extension under maximal redexes, when each node's
//! race outcome is encoded as priority.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::exec::{micro, transitions, ExecError};
use super::model::{ExecutionState, NodeObject, QualifiedName, UpdateMsg};
use super::rules::Transition;
use super::value::Value;
use crate::setrel::{max_redexes, sync_ext, Priority, SetRelError, SetRelation, DEFAULT_MAX_SET_SIZE};
use crate::term::{Term, TermSet};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BridgeError {
    #[error(transparent)]
    SetRel(#[from] SetRelError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

fn id_term(id: &QualifiedName) -> Term {
    Term::app("Id", id.parts().iter().map(|p| Term::sym(p.as_str())))
}

pub fn node_term(id: &QualifiedName, n: &NodeObject) -> Term {
    Term::app(
        "Node",
        [id_term(id), Term::sym(n.status.name()), Term::sym(n.outcome.name())],
    )
}

pub fn value_term(v: &Value) -> Term {
    match v {
        Value::Int(i) => Term::Int(*i),
        Value::Bool(b) => Term::Bool(*b),
        Value::Str(s) => Term::app("Str", [Term::sym(s.as_str())]),
        Value::Unknown => Term::sym("Unknown"),
    }
}

pub fn var_term(id: &QualifiedName, v: &Value) -> Term {
    Term::app("Var", [id_term(id), value_term(v)])
}

/// Every node and variable object of the state as a term.
pub fn encode(state: &ExecutionState) -> TermSet {
    let nodes = state.nodes.iter().map(|(id, n)| node_term(id, n));
    let vars = state.variables.iter().map(|(id, v)| var_term(id, &v.actval));
    nodes.chain(vars).collect()
}

struct Move {
    after: Term,
    /// Current variable term to its written replacement.
    writes: BTreeMap<Term, Term>,
}

/// The atomic relation of a fixed pre-state, as a set relation.
pub struct AtomicRelation {
    moves: BTreeMap<Term, Move>,
    limit: usize,
}

impl AtomicRelation {
    pub fn new(state: &ExecutionState) -> Result<Self, ExecError> {
        let ts = transitions(state, state.plan.node_ids())?;
        let mut moves = BTreeMap::new();
        for t in &ts {
            let before = state.nodes[&t.node];
            let mut after = before;
            let mut writes = BTreeMap::new();
            for u in &t.updates {
                match u {
                    UpdateMsg::Status(_, s) => after.status = *s,
                    UpdateMsg::Outcome(_, o) => after.outcome = *o,
                    UpdateMsg::Variable(x, v) => {
                        let cur = &state.variables[x].actval;
                        writes.insert(var_term(x, cur), var_term(x, v));
                    }
                }
            }
            moves.insert(
                node_term(&t.node, &before),
                Move {
                    after: node_term(&t.node, &after),
                    writes,
                },
            );
        }
        Ok(AtomicRelation {
            moves,
            limit: DEFAULT_MAX_SET_SIZE,
        })
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    /// Split a set into its one node term and the rest.
    fn split<'a>(&'a self, b: &TermSet) -> Option<(&'a Move, TermSet)> {
        let mut nodes = b.iter().filter(|t| t.head() == Some("Node"));
        let n = nodes.next()?;
        if nodes.next().is_some() {
            return None;
        }
        let m = self.moves.get(n)?;
        let rest: TermSet = b.iter().filter(|t| *t != n).cloned().collect();
        rest.iter().all(|t| m.writes.contains_key(t)).then_some((m, rest))
    }
}

impl SetRelation for AtomicRelation {
    fn step(&self, b: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        let Some((m, rest)) = self.split(b) else {
            return Ok(BTreeSet::new());
        };
        let mut out = TermSet::singleton(m.after.clone());
        for t in &rest {
            out.insert(m.writes[t].clone());
        }
        Ok(BTreeSet::from([out]))
    }

    fn max_set_size(&self) -> usize {
        self.limit
    }
}

/// Priority 2 for a node together with exactly the variables whose race it
/// wins, 1 for every other redex. A variable with a single writer is won by
/// it; with several, by the unique writer of strictly highest node priority.
pub struct RacePriority {
    won: BTreeMap<Term, TermSet>,
}

impl RacePriority {
    pub fn new(state: &ExecutionState) -> Result<Self, ExecError> {
        let ts = transitions(state, state.plan.node_ids())?;
        let mut writers: BTreeMap<&QualifiedName, Vec<(u64, &Transition)>> = BTreeMap::new();
        for t in &ts {
            let prio = state.plan.node(&t.node).map_or(0, |n| n.priority);
            for u in &t.updates {
                if let UpdateMsg::Variable(x, _) = u {
                    writers.entry(x).or_default().push((prio, t));
                }
            }
        }
        let mut won: BTreeMap<Term, TermSet> = ts
            .iter()
            .map(|t| (node_term(&t.node, &state.nodes[&t.node]), TermSet::new()))
            .collect();
        for (x, ws) in writers {
            let top = ws.iter().map(|w| w.0).max().unwrap_or(0);
            let best: Vec<_> = ws.iter().filter(|w| w.0 == top).collect();
            if let [(_, t)] = best[..] {
                let key = node_term(&t.node, &state.nodes[&t.node]);
                won.entry(key)
                    .or_default()
                    .insert(var_term(x, &state.variables[x].actval));
            }
        }
        Ok(RacePriority { won })
    }
}

impl Priority for RacePriority {
    fn priority(&self, b: &TermSet) -> u64 {
        let Some(n) = b.iter().find(|t| t.head() == Some("Node")) else {
            return 1;
        };
        let rest: TermSet = b.iter().filter(|t| *t != n).cloned().collect();
        match self.won.get(n) {
            Some(w) if *w == rest => 2,
            _ => 1,
        }
    }
}

/// Both sides of the differential check for one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeCheck {
    pub encoded: TermSet,
    /// `{encode(micro(state))}`, or empty when no rule fires.
    pub micro: BTreeSet<TermSet>,
    /// Synchronous successors of the encoded state.
    pub oracle: BTreeSet<TermSet>,
}

impl BridgeCheck {
    pub fn agrees(&self) -> bool {
        self.micro == self.oracle
    }
}

/// Run one micro step and one synchronous step of the encoded atomic
/// relation under maximal redexes, from the same state.
pub fn micro_as_setrel(state: &ExecutionState, limit: usize) -> Result<BridgeCheck, BridgeError> {
    let encoded = encode(state);
    if encoded.len() > limit {
        return Err(SetRelError::TooLarge {
            size: encoded.len(),
            limit,
        }
        .into());
    }
    let rel = AtomicRelation::new(state)?.with_limit(limit);
    let p = RacePriority::new(state)?;
    let oracle = sync_ext(&rel, max_redexes(&rel, p)).step(&encoded)?;
    let (next, report) = micro(state)?;
    let micro = if report.is_empty() {
        BTreeSet::new()
    } else {
        BTreeSet::from([encode(&next)])
    };
    Ok(BridgeCheck {
        encoded,
        micro,
        oracle,
    })
}

/// Short description of a divergence.
pub fn describe(check: &BridgeCheck) -> String {
    alloc::format!(
        "state {}\n  micro  {:?}\n  oracle {:?}",
        check.encoded,
        check.micro.iter().map(|s| alloc::format!("{s}")).collect::<Vec<_>>(),
        check.oracle.iter().map(|s| alloc::format!("{s}")).collect::<Vec<_>>()
    )
}
