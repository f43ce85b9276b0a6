//! The atomic relation as prioritized rule groups, loaded from a table.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::Cond;
use super::eval::{anc_end, anc_inv, eval, EvalError};
use super::model::{Body, ExecutionState, NodeSpec, QualifiedName, UpdateMsg};
use super::value::{NodeType, Outcome, Status, Value};

/// The built-in table.
pub const STANDARD_TABLE: &str = include_str!("rules.tbl");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    AncInvFalse,
    AncEndTrue,
    CondTrue(Cond),
    CondNotTrue(Cond),
    InvFalse,
    AckTrue,
    ChildrenFinished,
    Parent(Status),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateTemplate {
    Status(Status),
    Outcome(Outcome),
    VarValue,
    VarUnknown,
    ResetVars,
    Issue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Reference,
    Subset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicRule {
    pub label: String,
    pub guard: Vec<Atom>,
    pub updates: Vec<UpdateTemplate>,
    pub kind: RuleKind,
}

/// Rules of one (type, status) pair, highest priority first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleGroup {
    pub node_type: Option<NodeType>,
    pub status: Status,
    pub rules: Vec<AtomicRule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTable {
    groups: BTreeMap<(Option<NodeType>, Status), RuleGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("rule table line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

impl RuleTable {
    pub fn standard() -> Self {
        Self::parse(STANDARD_TABLE).expect("built-in rule table is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut groups: BTreeMap<(Option<NodeType>, Status), RuleGroup> = BTreeMap::new();
        let mut labels = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| TableError { line, message };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = body.split('|').map(str::trim).collect();
            let [ty, status, label, guard, updates, kind] = cols[..] else {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            };
            let node_type = match ty {
                "*" => None,
                t => Some(NodeType::from_name(t).ok_or_else(|| err(format!("unknown node type `{t}`")))?),
            };
            let status = Status::from_name(status).ok_or_else(|| err(format!("unknown status `{status}`")))?;
            if !labels.insert(String::from(label)) {
                return Err(err(format!("duplicate label `{label}`")));
            }
            let guard = split(guard)
                .map(|a| parse_atom(a).ok_or_else(|| err(format!("unknown guard atom `{a}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let updates = split(updates)
                .map(|u| parse_update(u).ok_or_else(|| err(format!("unknown update `{u}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let writes_var = updates
                .iter()
                .any(|u| matches!(u, UpdateTemplate::VarValue | UpdateTemplate::VarUnknown));
            if writes_var && node_type != Some(NodeType::Assignment) {
                return Err(err(String::from("variable updates need an Assignment row")));
            }
            let kind = match kind {
                "reference" => RuleKind::Reference,
                "subset" => RuleKind::Subset,
                k => return Err(err(format!("unknown rule kind `{k}`"))),
            };
            groups
                .entry((node_type, status))
                .or_insert_with(|| RuleGroup {
                    node_type,
                    status,
                    rules: Vec::new(),
                })
                .rules
                .push(AtomicRule {
                    label: String::from(label),
                    guard,
                    updates,
                    kind,
                });
        }
        Ok(RuleTable { groups })
    }

    /// The group for a node type and status: the typed group if present,
    /// else the wildcard group.
    pub fn group(&self, t: NodeType, s: Status) -> Option<&RuleGroup> {
        self.groups.get(&(Some(t), s)).or_else(|| self.groups.get(&(None, s)))
    }

    pub fn groups(&self) -> impl Iterator<Item = &RuleGroup> {
        self.groups.values()
    }

    pub fn rule(&self, label: &str) -> Option<&AtomicRule> {
        self.groups.values().flat_map(|g| &g.rules).find(|r| r.label == label)
    }
}

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_atom(s: &str) -> Option<Atom> {
    let cond = |name: &str| Cond::ALL.into_iter().find(|c| c.field() == name);
    Some(match s {
        "anc_inv=false" => Atom::AncInvFalse,
        "anc_end=true" => Atom::AncEndTrue,
        "inv=false" => Atom::InvFalse,
        "ack=true" => Atom::AckTrue,
        "children=finished" => Atom::ChildrenFinished,
        _ => {
            if let Some(st) = s.strip_prefix("parent=") {
                Atom::Parent(Status::from_name(st)?)
            } else if let Some(c) = s.strip_suffix("!=true") {
                Atom::CondNotTrue(cond(c)?)
            } else {
                Atom::CondTrue(cond(s.strip_suffix("=true")?)?)
            }
        }
    })
}

fn parse_update(s: &str) -> Option<UpdateTemplate> {
    Some(match s {
        "var=value" => UpdateTemplate::VarValue,
        "var=unknown" => UpdateTemplate::VarUnknown,
        "reset-vars" => UpdateTemplate::ResetVars,
        "issue" => UpdateTemplate::Issue,
        _ => {
            if let Some(st) = s.strip_prefix("status=") {
                UpdateTemplate::Status(Status::from_name(st)?)
            } else {
                UpdateTemplate::Outcome(Outcome::from_name(s.strip_prefix("outcome=")?)?)
            }
        }
    })
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::AncInvFalse => f.write_str("anc_inv=false"),
            Atom::AncEndTrue => f.write_str("anc_end=true"),
            Atom::CondTrue(c) => write!(f, "{}=true", c.field()),
            Atom::CondNotTrue(c) => write!(f, "{}!=true", c.field()),
            Atom::InvFalse => f.write_str("inv=false"),
            Atom::AckTrue => f.write_str("ack=true"),
            Atom::ChildrenFinished => f.write_str("children=finished"),
            Atom::Parent(s) => write!(f, "parent={s}"),
        }
    }
}

/// External name holding a command's acknowledgement.
pub fn ack_name(id: &QualifiedName) -> String {
    format!("{id}.ack")
}

fn atom_holds(atom: Atom, state: &ExecutionState, spec: &NodeSpec) -> Result<bool, EvalError> {
    let id = &spec.id;
    Ok(match atom {
        Atom::AncInvFalse => anc_inv(state, id)?.is_false(),
        Atom::AncEndTrue => anc_end(state, id)?.is_true(),
        Atom::CondTrue(c) => eval(state, spec.conditions.get(c))?.is_true(),
        Atom::CondNotTrue(c) => !eval(state, spec.conditions.get(c))?.is_true(),
        Atom::InvFalse => eval(state, &spec.conditions.inv)?.is_false(),
        Atom::AckTrue => state.external.get(&ack_name(id)).is_some_and(Value::is_true),
        Atom::ChildrenFinished => spec
            .children()
            .iter()
            .all(|c| state.status(c) == Some(Status::Finished)),
        Atom::Parent(s) => match &spec.parent {
            None => s == Status::Executing,
            Some(p) => state.status(p) == Some(s),
        },
    })
}

/// Whether every atom of the rule's guard holds for `node` in `state`.
pub fn guard_holds(rule: &AtomicRule, state: &ExecutionState, node: &QualifiedName) -> Result<bool, EvalError> {
    let spec = state
        .plan
        .node(node)
        .ok_or_else(|| EvalError::UnknownObject(format!("{node}")))?;
    for a in &rule.guard {
        if !atom_holds(*a, state, spec)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One atomic transition: the rule that fired and its instantiated updates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub node: QualifiedName,
    pub label: String,
    pub updates: Vec<UpdateMsg>,
    /// Rendered command, when the rule issues one.
    pub issued: Option<String>,
}

/// The first rule of `group`, in priority order, whose guard holds for
/// `node`; `None` if no rule applies.
pub fn atomic_try(
    group: &RuleGroup,
    state: &ExecutionState,
    node: &QualifiedName,
) -> Result<Option<Transition>, EvalError> {
    let spec = state
        .plan
        .node(node)
        .ok_or_else(|| EvalError::UnknownObject(format!("{node}")))?;
    for rule in &group.rules {
        if guard_holds(rule, state, node)? {
            return instantiate(rule, state, spec).map(Some);
        }
    }
    Ok(None)
}

fn instantiate(rule: &AtomicRule, state: &ExecutionState, spec: &NodeSpec) -> Result<Transition, EvalError> {
    let id = &spec.id;
    let mut updates = Vec::new();
    let mut issued = None;
    for u in &rule.updates {
        match u {
            UpdateTemplate::Status(s) => updates.push(UpdateMsg::Status(id.clone(), *s)),
            UpdateTemplate::Outcome(o) => updates.push(UpdateMsg::Outcome(id.clone(), *o)),
            UpdateTemplate::VarValue => {
                if let Body::Assignment { target, expr } = &spec.body {
                    updates.push(UpdateMsg::Variable(target.clone(), eval(state, expr)?));
                }
            }
            UpdateTemplate::VarUnknown => {
                if let Body::Assignment { target, .. } = &spec.body {
                    updates.push(UpdateMsg::Variable(target.clone(), Value::Unknown));
                }
            }
            UpdateTemplate::ResetVars => {
                for v in &spec.declares {
                    let init = state.plan.var(v).map(|s| s.initval.clone()).unwrap_or(Value::Unknown);
                    updates.push(UpdateMsg::Variable(v.clone(), init));
                }
            }
            UpdateTemplate::Issue => {
                if let Body::Command(Some(call)) = &spec.body {
                    let mut text = format!("{}(", call.name);
                    for (i, a) in call.args.iter().enumerate() {
                        if i > 0 {
                            text.push_str(", ");
                        }
                        text.push_str(&format!("{}", eval(state, a)?));
                    }
                    text.push(')');
                    issued = Some(text);
                }
            }
        }
    }
    Ok(Transition {
        node: id.clone(),
        label: rule.label.clone(),
        updates,
        issued,
    })
}
