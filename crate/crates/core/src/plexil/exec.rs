//! Micro, quiescence, macro and execution relations.
//!
//! A micro step evaluates every node's rule group against the same
//! pre-state, primes the nodes that transition and queues their update
//! messages, resolves assignment races, then applies the surviving updates
//! and unprimes.

#![allow(clippy::result_large_err)]

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::eval::EvalError;
use super::model::{ExecutionState, QualifiedName, Snapshot, UpdateMsg};
use super::rules::{atomic_try, Transition};
use super::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("update targets unknown object `{0}`")]
    UnknownTarget(String),
    #[error("spurious loop: the state after micro step {repeat} equals the state after step {first}")]
    SpuriousLoop { first: usize, repeat: usize },
    #[error("no micro normal form within {bound} steps")]
    BoundExhausted { bound: usize },
}

/// Writers competing for one variable in a micro step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaceNote {
    pub variable: QualifiedName,
    /// `(node, priority)` in node-id order.
    pub writers: Vec<(QualifiedName, u64)>,
    pub winner: Option<QualifiedName>,
}

impl fmt::Display for RaceNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.variable)?;
        for (i, (n, p)) in self.writers.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}:{p}")?;
        }
        match &self.winner {
            Some(w) => write!(f, "] -> {w}"),
            None => f.write_str("] -> none"),
        }
    }
}

/// What one micro step did. Lists are in canonical order, independent of the
/// order nodes were scanned in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MicroReport {
    pub fired: Vec<(QualifiedName, String)>,
    pub updates: Vec<UpdateMsg>,
    pub races: Vec<RaceNote>,
    /// `(node, command)` for every command issued.
    pub issued: Vec<(QualifiedName, String)>,
}

impl MicroReport {
    pub fn is_empty(&self) -> bool {
        self.fired.is_empty()
    }
}

/// Every atomic transition enabled in `state`, trying nodes in `order`.
pub fn transitions(state: &ExecutionState, order: &[QualifiedName]) -> Result<Vec<Transition>, ExecError> {
    let mut out = Vec::new();
    for id in order {
        let spec = state
            .plan
            .node(id)
            .ok_or_else(|| ExecError::UnknownTarget(format!("{id}")))?;
        let status = state.status(id).ok_or_else(|| ExecError::UnknownTarget(format!("{id}")))?;
        if let Some(group) = state.plan.rules().group(spec.kind, status) {
            if let Some(t) = atomic_try(group, state, id)? {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Keep only the winning write to each variable: a variable written by one
/// node keeps that write; with several writers the unique highest-priority
/// writer wins and a tie drops every write. Node-local updates always
/// survive.
pub fn resolve_races(state: &ExecutionState, ts: &[Transition]) -> (Vec<UpdateMsg>, Vec<RaceNote>) {
    let mut writers: BTreeMap<&QualifiedName, Vec<(&QualifiedName, u64)>> = BTreeMap::new();
    for t in ts {
        let prio = state.plan.node(&t.node).map_or(0, |s| s.priority);
        for u in &t.updates {
            if let UpdateMsg::Variable(v, _) = u {
                writers.entry(v).or_default().push((&t.node, prio));
            }
        }
    }
    let mut winners: BTreeMap<&QualifiedName, Option<&QualifiedName>> = BTreeMap::new();
    let mut races = Vec::new();
    for (v, mut ws) in writers {
        if ws.len() == 1 {
            winners.insert(v, Some(ws[0].0));
            continue;
        }
        ws.sort();
        let top = ws.iter().map(|w| w.1).max().unwrap_or(0);
        let mut best = ws.iter().filter(|w| w.1 == top);
        let winner = match (best.next(), best.next()) {
            (Some(w), None) => Some(w.0),
            _ => None,
        };
        winners.insert(v, winner);
        races.push(RaceNote {
            variable: v.clone(),
            writers: ws.iter().map(|(n, p)| ((*n).clone(), *p)).collect(),
            winner: winner.cloned(),
        });
    }
    let mut kept = Vec::new();
    for t in ts {
        for u in &t.updates {
            let keep = match u {
                UpdateMsg::Variable(v, _) => winners.get(v).copied().flatten() == Some(&t.node),
                _ => true,
            };
            if keep {
                kept.push(u.clone());
            }
        }
    }
    (kept, races)
}

/// Consume every pending message, overwriting its target field.
pub fn apply_updates(state: &mut ExecutionState) -> Result<(), ExecError> {
    for msg in core::mem::take(&mut state.pending) {
        match msg {
            UpdateMsg::Status(id, s) => node_mut(state, &id)?.status = s,
            UpdateMsg::Outcome(id, o) => node_mut(state, &id)?.outcome = o,
            UpdateMsg::Variable(id, v) => {
                state
                    .variables
                    .get_mut(&id)
                    .ok_or_else(|| ExecError::UnknownTarget(format!("{id}")))?
                    .actval = v
            }
        }
    }
    Ok(())
}

fn node_mut<'a>(
    state: &'a mut ExecutionState,
    id: &QualifiedName,
) -> Result<&'a mut super::model::NodeObject, ExecError> {
    state
        .nodes
        .get_mut(id)
        .ok_or_else(|| ExecError::UnknownTarget(format!("{id}")))
}

pub fn unprime(state: &mut ExecutionState) {
    state.primed.clear();
}

/// One micro step, scanning nodes in plan order.
pub fn micro(state: &ExecutionState) -> Result<(ExecutionState, MicroReport), ExecError> {
    let order = state.plan.node_ids().to_vec();
    micro_with_order(state, &order)
}

/// One micro step, scanning nodes in the given order. Every node of the plan
/// must appear once.
pub fn micro_with_order(
    state: &ExecutionState,
    order: &[QualifiedName],
) -> Result<(ExecutionState, MicroReport), ExecError> {
    let mut ts = transitions(state, order)?;
    ts.sort_by(|a, b| a.node.cmp(&b.node));
    if ts.is_empty() {
        return Ok((state.clone(), MicroReport::default()));
    }
    let (updates, races) = resolve_races(state, &ts);

    let mut next = state.clone();
    for t in &ts {
        next.primed.insert(t.node.clone());
    }
    next.pending = updates.clone();
    apply_updates(&mut next)?;
    unprime(&mut next);

    let report = MicroReport {
        fired: ts.iter().map(|t| (t.node.clone(), t.label.clone())).collect(),
        updates,
        races,
        issued: ts
            .iter()
            .filter_map(|t| t.issued.clone().map(|c| (t.node.clone(), c)))
            .collect(),
    };
    Ok((next, report))
}

/// The state a quiescence or execution stopped in, with what it did so far.
#[derive(Clone, Debug)]
pub struct Halt {
    pub error: ExecError,
    pub state: ExecutionState,
    pub reports: Vec<MicroReport>,
}

impl fmt::Display for Halt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} after {} micro steps", self.error, self.reports.len())
    }
}

/// Iterate micro steps until none fires. Fails with `SpuriousLoop` when a
/// state recurs and with `BoundExhausted` after `bound` steps without a
/// normal form.
pub fn quiescence(state: &ExecutionState, bound: usize) -> Result<(ExecutionState, Vec<MicroReport>), Halt> {
    quiescence_with(state, bound, None, &mut |_, _, _| {})
}

/// Called for every micro step evaluated, including the final one that
/// fires nothing, with the pre-state, the report and the post-state.
pub type Observer<'a> = dyn FnMut(&ExecutionState, &MicroReport, &ExecutionState) + 'a;

/// [`quiescence`] with an explicit node scan order (plan order if `None`),
/// reporting each micro step to `observe`.
pub fn quiescence_with(
    state: &ExecutionState,
    bound: usize,
    order: Option<&[QualifiedName]>,
    observe: &mut Observer<'_>,
) -> Result<(ExecutionState, Vec<MicroReport>), Halt> {
    let mut cur = state.clone();
    let mut reports = Vec::new();
    let mut seen: BTreeMap<Snapshot, usize> = BTreeMap::new();
    seen.insert(cur.snapshot(), 0);
    loop {
        let step = match order {
            Some(o) => micro_with_order(&cur, o),
            None => micro(&cur),
        };
        let (next, report) = match step {
            Ok(r) => r,
            Err(error) => {
                return Err(Halt {
                    error,
                    state: cur,
                    reports,
                })
            }
        };
        observe(&cur, &report, &next);
        if report.is_empty() {
            return Ok((cur, reports));
        }
        if reports.len() == bound {
            return Err(Halt {
                error: ExecError::BoundExhausted { bound },
                state: cur,
                reports,
            });
        }
        reports.push(report);
        cur = next;
        let step = reports.len();
        if let Some(first) = seen.insert(cur.snapshot(), step) {
            return Err(Halt {
                error: ExecError::SpuriousLoop { first, repeat: step },
                state: cur,
                reports,
            });
        }
    }
}

/// An event: external bindings applied at the start of a macro step.
pub type Event = Vec<(String, Value)>;

/// Overwrite Γ with the event's bindings, then quiesce.
pub fn macro_step(
    state: &ExecutionState,
    event: &[(String, Value)],
    bound: usize,
) -> Result<(ExecutionState, Vec<MicroReport>), Halt> {
    macro_step_with(state, event, bound, None, &mut |_, _, _| {})
}

pub fn macro_step_with(
    state: &ExecutionState,
    event: &[(String, Value)],
    bound: usize,
    order: Option<&[QualifiedName]>,
    observe: &mut Observer<'_>,
) -> Result<(ExecutionState, Vec<MicroReport>), Halt> {
    let mut s = state.clone();
    for (name, v) in event {
        s.external.insert(name.clone(), v.clone());
    }
    quiescence_with(&s, bound, order, observe)
}

#[derive(Clone, Debug)]
pub struct MacroRecord {
    pub event: Event,
    pub reports: Vec<MicroReport>,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub records: Vec<MacroRecord>,
    pub final_state: ExecutionState,
}

/// A run that stopped early: the records so far (the last one partial) and
/// the reason.
#[derive(Clone, Debug)]
pub struct TraceHalt {
    pub trace: Trace,
    pub error: ExecError,
}

/// Fold macro steps over the events.
pub fn execute(state: &ExecutionState, events: &[Event], bound: usize) -> Result<Trace, TraceHalt> {
    execute_with(state, events, bound, None, &mut |_, _, _| {})
}

pub fn execute_with(
    state: &ExecutionState,
    events: &[Event],
    bound: usize,
    order: Option<&[QualifiedName]>,
    observe: &mut Observer<'_>,
) -> Result<Trace, TraceHalt> {
    let mut cur = state.clone();
    let mut records = Vec::new();
    for event in events {
        match macro_step_with(&cur, event, bound, order, observe) {
            Ok((next, reports)) => {
                records.push(MacroRecord {
                    event: event.clone(),
                    reports,
                });
                cur = next;
            }
            Err(halt) => {
                records.push(MacroRecord {
                    event: event.clone(),
                    reports: halt.reports,
                });
                return Err(TraceHalt {
                    trace: Trace {
                        records,
                        final_state: halt.state,
                    },
                    error: halt.error,
                });
            }
        }
    }
    Ok(Trace {
        records,
        final_state: cur,
    })
}
