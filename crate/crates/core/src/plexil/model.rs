//! Compiled plans and execution states `Γ ⊢ π`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::ast::{CommandCall, Cond, Expr, VarType};
use super::rules::RuleTable;
use super::value::{NodeType, Outcome, Status, Value};

/// A hierarchical name, child first: `Counter.Loop.SafeDrive`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName(Vec<String>);

impl QualifiedName {
    pub fn root(name: impl Into<String>) -> Self {
        QualifiedName(alloc::vec![name.into()])
    }

    /// `name.self`
    pub fn child(&self, name: impl Into<String>) -> Self {
        let mut parts = alloc::vec![name.into()];
        parts.extend(self.0.iter().cloned());
        QualifiedName(parts)
    }

    pub fn parent(&self) -> Option<QualifiedName> {
        (self.0.len() > 1).then(|| QualifiedName(self.0[1..].to_vec()))
    }

    pub fn short(&self) -> &str {
        &self.0[0]
    }

    pub fn parts(&self) -> &[String] {
        &self.0
    }

    /// Parse a dotted name. `None` on an empty component.
    pub fn parse(text: &str) -> Option<Self> {
        let parts: Vec<String> = text.split('.').map(String::from).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        Some(QualifiedName(parts))
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(p)?;
        }
        Ok(())
    }
}

/// A compiled expression: names resolved to object ids.
pub type CExpr = Expr<QualifiedName>;

/// The seven conditions of a node, defaults filled in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conditions {
    pub start: CExpr,
    pub skip: CExpr,
    pub repeat: CExpr,
    pub end: CExpr,
    pub pre: CExpr,
    pub post: CExpr,
    pub inv: CExpr,
}

impl Conditions {
    pub fn get(&self, c: Cond) -> &CExpr {
        match c {
            Cond::Start => &self.start,
            Cond::Skip => &self.skip,
            Cond::Repeat => &self.repeat,
            Cond::End => &self.end,
            Cond::Pre => &self.pre,
            Cond::Post => &self.post,
            Cond::Inv => &self.inv,
        }
    }

    pub(crate) fn get_mut(&mut self, c: Cond) -> &mut CExpr {
        match c {
            Cond::Start => &mut self.start,
            Cond::Skip => &mut self.skip,
            Cond::Repeat => &mut self.repeat,
            Cond::End => &mut self.end,
            Cond::Pre => &mut self.pre,
            Cond::Post => &mut self.post,
            Cond::Inv => &mut self.inv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Empty,
    List(Vec<QualifiedName>),
    Command(Option<CommandCall<QualifiedName>>),
    Assignment { target: QualifiedName, expr: CExpr },
}

/// The static part of a node object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub id: QualifiedName,
    pub kind: NodeType,
    pub parent: Option<QualifiedName>,
    pub conditions: Conditions,
    pub body: Body,
    /// Assignment priority; 0 for every other node.
    pub priority: u64,
    /// Variables declared by this node.
    pub declares: Vec<QualifiedName>,
}

impl NodeSpec {
    pub fn children(&self) -> &[QualifiedName] {
        match &self.body {
            Body::List(c) => c,
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpec {
    pub id: QualifiedName,
    pub ty: VarType,
    pub initval: Value,
}

/// A compiled plan: node specs in pre-order, and variable specs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub(crate) nodes: BTreeMap<QualifiedName, NodeSpec>,
    pub(crate) order: Vec<QualifiedName>,
    pub(crate) vars: BTreeMap<QualifiedName, VarSpec>,
    pub(crate) rules: Arc<RuleTable>,
}

impl Plan {
    pub fn rules(&self) -> &RuleTable {
        &self.rules
    }

    pub fn root(&self) -> &QualifiedName {
        &self.order[0]
    }

    pub fn node(&self, id: &QualifiedName) -> Option<&NodeSpec> {
        self.nodes.get(id)
    }

    pub fn var(&self, id: &QualifiedName) -> Option<&VarSpec> {
        self.vars.get(id)
    }

    /// Node ids in plan pre-order.
    pub fn node_ids(&self) -> &[QualifiedName] {
        &self.order
    }

    pub fn var_ids(&self) -> impl Iterator<Item = &QualifiedName> {
        self.vars.keys()
    }

    /// Proper ancestors, nearest first.
    pub fn ancestors(&self, id: &QualifiedName) -> Vec<&NodeSpec> {
        let mut out = Vec::new();
        let mut cur = self.nodes.get(id).and_then(|n| n.parent.as_ref());
        while let Some(p) = cur {
            let spec = &self.nodes[p];
            out.push(spec);
            cur = spec.parent.as_ref();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeObject {
    pub status: Status,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableObject {
    pub initval: Value,
    pub actval: Value,
}

/// Deferred update actions collected during a micro step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpdateMsg {
    Status(QualifiedName, Status),
    Outcome(QualifiedName, Outcome),
    Variable(QualifiedName, Value),
}

impl UpdateMsg {
    pub fn target(&self) -> &QualifiedName {
        match self {
            UpdateMsg::Status(id, _) | UpdateMsg::Outcome(id, _) | UpdateMsg::Variable(id, _) => id,
        }
    }
}

impl fmt::Display for UpdateMsg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateMsg::Status(id, s) => write!(f, "{id}.status={s}"),
            UpdateMsg::Outcome(id, o) => write!(f, "{id}.outcome={o}"),
            UpdateMsg::Variable(id, v) => write!(f, "{id}={v}"),
        }
    }
}

/// External state Γ: one binding per name.
pub type ExternalState = BTreeMap<String, Value>;

/// The dynamic part of a state, used for equality and cycle detection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Snapshot {
    pub external: ExternalState,
    pub nodes: BTreeMap<QualifiedName, NodeObject>,
    pub variables: BTreeMap<QualifiedName, VariableObject>,
}

/// `Γ ⊢ π` together with the plan it runs.
#[derive(Clone, Debug)]
pub struct ExecutionState {
    pub plan: Arc<Plan>,
    pub external: ExternalState,
    pub nodes: BTreeMap<QualifiedName, NodeObject>,
    pub variables: BTreeMap<QualifiedName, VariableObject>,
    pub primed: BTreeSet<QualifiedName>,
    pub pending: Vec<UpdateMsg>,
}

impl PartialEq for ExecutionState {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.plan, &other.plan) || self.plan == other.plan)
            && self.external == other.external
            && self.nodes == other.nodes
            && self.variables == other.variables
            && self.primed == other.primed
            && self.pending == other.pending
    }
}

impl Eq for ExecutionState {}

impl ExecutionState {
    /// Initial state: every node Inactive with outcome None, variables at
    /// their initial values, Γ empty.
    pub fn new(plan: Arc<Plan>) -> Self {
        let nodes = plan
            .order
            .iter()
            .map(|id| {
                (
                    id.clone(),
                    NodeObject {
                        status: Status::Inactive,
                        outcome: Outcome::None,
                    },
                )
            })
            .collect();
        let variables = plan
            .vars
            .values()
            .map(|v| {
                (
                    v.id.clone(),
                    VariableObject {
                        initval: v.initval.clone(),
                        actval: v.initval.clone(),
                    },
                )
            })
            .collect();
        ExecutionState {
            plan,
            external: ExternalState::new(),
            nodes,
            variables,
            primed: BTreeSet::new(),
            pending: Vec::new(),
        }
    }

    pub fn node(&self, id: &QualifiedName) -> Option<&NodeObject> {
        self.nodes.get(id)
    }

    pub fn status(&self, id: &QualifiedName) -> Option<Status> {
        self.nodes.get(id).map(|n| n.status)
    }

    pub fn variable(&self, id: &QualifiedName) -> Option<&VariableObject> {
        self.variables.get(id)
    }

    /// Look up a node or variable by its dotted name.
    pub fn status_of(&self, dotted: &str) -> Option<Status> {
        self.status(&QualifiedName::parse(dotted)?)
    }

    pub fn actval_of(&self, dotted: &str) -> Option<&Value> {
        self.variable(&QualifiedName::parse(dotted)?).map(|v| &v.actval)
    }

    /// Between micro steps there are no primed objects and no messages.
    pub fn is_settled(&self) -> bool {
        self.primed.is_empty() && self.pending.is_empty()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            external: self.external.clone(),
            nodes: self.nodes.clone(),
            variables: self.variables.clone(),
        }
    }

    /// Sorted `id field = value` lines; external bindings use the field
    /// `env`.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        for (id, n) in &self.nodes {
            lines.push(format!("{id} status = {}", n.status));
            lines.push(format!("{id} outcome = {}", n.outcome));
        }
        for (id, v) in &self.variables {
            lines.push(format!("{id} initval = {}", v.initval));
            lines.push(format!("{id} actval = {}", v.actval));
        }
        for (name, v) in &self.external {
            lines.push(format!("{name} env = {v}"));
        }
        lines.sort();
        let mut out = String::new();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}
