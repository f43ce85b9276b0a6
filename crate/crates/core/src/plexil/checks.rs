//! Executable forms of the executive's invariants, evaluated on one micro
//! step at a time.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::exec::{micro_with_order, MicroReport};
use super::model::{ExecutionState, QualifiedName, UpdateMsg};
use super::rules::guard_holds;

/// A variable changes only together with the status of the node that
/// wrote it, and every fired node's status or outcome update is visible in
/// the post-state.
pub fn check_atomicity(pre: &ExecutionState, report: &MicroReport, post: &ExecutionState) -> Result<(), String> {
    for (x, v) in &post.variables {
        let before = &pre.variables[x].actval;
        if *before == v.actval {
            continue;
        }
        let write = report
            .updates
            .iter()
            .any(|u| matches!(u, UpdateMsg::Variable(y, w) if y == x && *w == v.actval));
        if !write {
            return Err(format!("{x} changed from {before} to {} without a surviving write", v.actval));
        }
        let paired = report.fired.iter().any(|(n, _)| {
            writes(pre, n, x) && pre.status(n) != post.status(n)
        });
        if !paired {
            return Err(format!("{x} changed without a status change of its writer"));
        }
    }
    for u in &report.updates {
        let ok = match u {
            UpdateMsg::Status(n, s) => post.status(n) == Some(*s),
            UpdateMsg::Outcome(n, o) => post.node(n).map(|o| o.outcome) == Some(*o),
            UpdateMsg::Variable(x, v) => post.variable(x).map(|o| &o.actval) == Some(v),
        };
        if !ok {
            return Err(format!("update {u} not reflected in the post-state"));
        }
    }
    Ok(())
}

fn writes(state: &ExecutionState, node: &QualifiedName, x: &QualifiedName) -> bool {
    let Some(spec) = state.plan.node(node) else {
        return false;
    };
    spec.declares.contains(x) || matches!(&spec.body, super::model::Body::Assignment { target, .. } if target == x)
}

/// Every scan order gives the same micro step as the first.
pub fn check_synchrony(state: &ExecutionState, orders: &[Vec<QualifiedName>]) -> Result<(), String> {
    let mut results = Vec::new();
    for o in orders {
        results.push(micro_with_order(state, o).map_err(|e| format!("{e}"))?);
    }
    for (i, r) in results.iter().enumerate().skip(1) {
        if *r != results[0] {
            return Err(format!("scan order {i} gives a different micro step"));
        }
    }
    Ok(())
}

/// A handful of scan orders over the plan's nodes: plan order, reversed,
/// sorted by id, and two rotations.
pub fn scan_orders(state: &ExecutionState) -> Vec<Vec<QualifiedName>> {
    let base = state.plan.node_ids().to_vec();
    let mut rev = base.clone();
    rev.reverse();
    let mut sorted = base.clone();
    sorted.sort();
    let mut out = alloc::vec![base.clone(), rev, sorted];
    if base.len() > 1 {
        for k in [1, base.len() / 2] {
            let mut r = base.clone();
            r.rotate_left(k);
            out.push(r);
        }
    }
    out
}

/// For every fired rule, no rule above it in its group has a guard that
/// holds in the pre-state.
pub fn check_group_priority(pre: &ExecutionState, report: &MicroReport) -> Result<(), String> {
    let rules = pre.plan.rules();
    for (n, label) in &report.fired {
        let spec = pre.plan.node(n).ok_or_else(|| format!("no node {n}"))?;
        let status = pre.status(n).ok_or_else(|| format!("no node {n}"))?;
        let group = rules
            .group(spec.kind, status)
            .ok_or_else(|| format!("{n} fired {label} without a rule group"))?;
        let pos = group
            .rules
            .iter()
            .position(|r| r.label == *label)
            .ok_or_else(|| format!("{label} is not in the group of {n}"))?;
        for higher in &group.rules[..pos] {
            if guard_holds(higher, pre, n).map_err(|e| format!("{e}"))? {
                return Err(format!("{n} fired {label} but higher rule {} applies", higher.label));
            }
        }
        if !guard_holds(&group.rules[pos], pre, n).map_err(|e| format!("{e}"))? {
            return Err(format!("{n} fired {label} whose guard does not hold"));
        }
    }
    Ok(())
}

/// At most one write per variable survives, and a surviving write from a
/// race belongs to the writer of strictly highest priority.
pub fn check_race_rule(pre: &ExecutionState, report: &MicroReport) -> Result<(), String> {
    let mut seen: BTreeMap<&QualifiedName, usize> = BTreeMap::new();
    for u in &report.updates {
        if let UpdateMsg::Variable(x, _) = u {
            *seen.entry(x).or_default() += 1;
        }
    }
    if let Some((x, n)) = seen.iter().find(|(_, n)| **n > 1) {
        return Err(format!("{n} writes to {x} survived"));
    }
    for race in &report.races {
        if let Some(w) = &race.winner {
            let wp = pre.plan.node(w).map_or(0, |s| s.priority);
            for (n, p) in &race.writers {
                if n != w && *p >= wp {
                    return Err(format!("{w} won {} against {n} of priority {p}", race.variable));
                }
            }
        } else if seen.contains_key(&race.variable) {
            return Err(format!("tied race on {} still wrote", race.variable));
        }
    }
    Ok(())
}
