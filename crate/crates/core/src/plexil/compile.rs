//! Compilation of a parsed plan into its initial execution state.
//!
//! Omitted conditions get defaults: `Start` true, `Skip` false,
//! `Repeat-while` false, `Pre`/`Post`/`Inv` true, and `End` true for leaf
//! nodes or "every child is FINISHED" for List nodes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ast::{BinOp, CommandCall, Expr, NameUse, NodeAst, PlanAst, VarType};
use super::model::{Body, CExpr, Conditions, ExecutionState, NodeSpec, Plan, QualifiedName, VarSpec};
use super::rules::RuleTable;
use super::value::{NodeType, Status, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("in {node}: unresolved variable `{name}`")]
    UnresolvedVariable { node: String, name: String },
    #[error("in {node}: assignment to undeclared variable `{name}`")]
    UndeclaredTarget { node: String, name: String },
    #[error("in {node}: reference to unknown node `{name}`")]
    UnknownNode { node: String, name: String },
    #[error("in {node}: Assignment node without an `Assignment:` clause")]
    MissingAssignment { node: String },
    #[error("object id `{0}` is used twice")]
    DuplicateId(String),
    #[error("in {node}: {message}")]
    Type { node: String, message: String },
}

/// Compile to a shared plan using the built-in rule table.
pub fn compile_plan(ast: &PlanAst) -> Result<Arc<Plan>, CompileError> {
    compile_plan_with(ast, Arc::new(RuleTable::standard()))
}

/// Compile to a shared plan executed by the given rule table.
pub fn compile_plan_with(ast: &PlanAst, rules: Arc<RuleTable>) -> Result<Arc<Plan>, CompileError> {
    let mut flat: Vec<(QualifiedName, &NodeAst, Option<QualifiedName>)> = Vec::new();
    flatten(&ast.root, QualifiedName::root(ast.root.name.clone()), None, &mut flat);

    let by_id: BTreeMap<&QualifiedName, &NodeAst> = flat.iter().map(|(id, n, _)| (id, *n)).collect();
    let mut vars = BTreeMap::new();
    let mut ids = alloc::collections::BTreeSet::new();
    for (id, _, _) in &flat {
        if !ids.insert(id.clone()) {
            return Err(CompileError::DuplicateId(format!("{id}")));
        }
    }
    for (id, node, _) in &flat {
        for d in &node.decls {
            let vid = id.child(d.name.clone());
            if !ids.insert(vid.clone()) {
                return Err(CompileError::DuplicateId(format!("{vid}")));
            }
            vars.insert(
                vid.clone(),
                VarSpec {
                    id: vid,
                    ty: d.ty,
                    initval: d.init.clone(),
                },
            );
        }
    }

    let scope = Scope {
        by_id: &by_id,
        vars: &vars,
    };
    let mut nodes = BTreeMap::new();
    let mut order = Vec::new();
    for (id, node, parent) in &flat {
        let spec = scope.node_spec(id, node, parent.clone())?;
        order.push(id.clone());
        nodes.insert(id.clone(), spec);
    }
    Ok(Arc::new(Plan {
        nodes,
        order,
        vars,
        rules,
    }))
}

/// Compile to the initial execution state.
pub fn compile(ast: &PlanAst) -> Result<ExecutionState, CompileError> {
    Ok(ExecutionState::new(compile_plan(ast)?))
}

fn flatten<'a>(
    node: &'a NodeAst,
    id: QualifiedName,
    parent: Option<QualifiedName>,
    out: &mut Vec<(QualifiedName, &'a NodeAst, Option<QualifiedName>)>,
) {
    out.push((id.clone(), node, parent));
    for c in &node.children {
        flatten(c, id.child(c.name.clone()), Some(id.clone()), out);
    }
}

struct Scope<'a> {
    by_id: &'a BTreeMap<&'a QualifiedName, &'a NodeAst>,
    vars: &'a BTreeMap<QualifiedName, VarSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Str,
    Any,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Bool => "bool",
            Ty::Str => "string",
            Ty::Any => "unknown",
        }
    }

    fn fits(self, want: Ty) -> bool {
        self == want || self == Ty::Any || want == Ty::Any
    }
}

fn var_ty(t: VarType) -> Ty {
    match t {
        VarType::Int => Ty::Int,
        VarType::Bool => Ty::Bool,
    }
}

impl Scope<'_> {
    /// Innermost declaration visible from `at`.
    fn resolve_var(&self, at: &QualifiedName, name: &str) -> Option<QualifiedName> {
        let mut cur = Some(at.clone());
        while let Some(s) = cur {
            let vid = s.child(name);
            if self.vars.contains_key(&vid) {
                return Some(vid);
            }
            cur = s.parent();
        }
        None
    }

    /// Walk up from `at`; at each level try the node itself, then its
    /// children.
    fn resolve_node(&self, at: &QualifiedName, name: &str) -> Option<QualifiedName> {
        let mut cur = Some(at.clone());
        while let Some(s) = cur {
            if s.short() == name {
                return Some(s);
            }
            let node = self.by_id[&s];
            if node.children.iter().any(|c| c.name == name) {
                return Some(s.child(name));
            }
            cur = s.parent();
        }
        None
    }

    fn expr(&self, at: &QualifiedName, e: &Expr<String>) -> Result<CExpr, CompileError> {
        e.try_map(&mut |usage, name: &String| match usage {
            NameUse::Variable => {
                self.resolve_var(at, name)
                    .ok_or_else(|| CompileError::UnresolvedVariable {
                        node: format!("{at}"),
                        name: name.clone(),
                    })
            }
            NameUse::Node => self.resolve_node(at, name).ok_or_else(|| CompileError::UnknownNode {
                node: format!("{at}"),
                name: name.clone(),
            }),
        })
    }

    fn type_of(&self, at: &QualifiedName, e: &CExpr) -> Result<Ty, CompileError> {
        let err = |message: String| CompileError::Type {
            node: format!("{at}"),
            message,
        };
        Ok(match e {
            Expr::Lit(Value::Int(_)) => Ty::Int,
            Expr::Lit(Value::Bool(_)) => Ty::Bool,
            Expr::Lit(Value::Str(_)) => Ty::Str,
            Expr::Lit(Value::Unknown) | Expr::Lookup(_) => Ty::Any,
            Expr::Var(id) => var_ty(self.vars[id].ty),
            Expr::NodeStatus(_) | Expr::NodeOutcome(_) => Ty::Str,
            Expr::Not(inner) => {
                let t = self.type_of(at, inner)?;
                if !t.fits(Ty::Bool) {
                    return Err(err(format!("NOT applied to {}", t.name())));
                }
                Ty::Bool
            }
            Expr::Bin(op, l, r) => {
                let (lt, rt) = (self.type_of(at, l)?, self.type_of(at, r)?);
                let want = match op {
                    BinOp::And | BinOp::Or => Some(Ty::Bool),
                    BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => Some(Ty::Int),
                    BinOp::Add | BinOp::Sub | BinOp::Mul => Some(Ty::Int),
                    BinOp::Eq | BinOp::Ne => None,
                };
                let ok = match want {
                    Some(w) => lt.fits(w) && rt.fits(w),
                    None => lt.fits(rt),
                };
                if !ok {
                    return Err(err(format!(
                        "`{}` applied to {} and {}",
                        op.symbol(),
                        lt.name(),
                        rt.name()
                    )));
                }
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => Ty::Int,
                    _ => Ty::Bool,
                }
            }
        })
    }

    fn node_spec(
        &self,
        id: &QualifiedName,
        node: &NodeAst,
        parent: Option<QualifiedName>,
    ) -> Result<NodeSpec, CompileError> {
        let t = Expr::Lit(Value::Bool(true));
        let f = Expr::Lit(Value::Bool(false));
        let children: Vec<QualifiedName> = node.children.iter().map(|c| id.child(c.name.clone())).collect();
        let end = if node.kind == NodeType::List {
            all_finished(&children)
        } else {
            t.clone()
        };
        let mut conditions = Conditions {
            start: t.clone(),
            skip: f.clone(),
            repeat: f,
            end,
            pre: t.clone(),
            post: t.clone(),
            inv: t,
        };
        for (c, e) in &node.conditions {
            let ce = self.expr(id, e)?;
            let ty = self.type_of(id, &ce)?;
            if !ty.fits(Ty::Bool) {
                return Err(CompileError::Type {
                    node: format!("{id}"),
                    message: format!("{} condition has type {}", c.keyword(), ty.name()),
                });
            }
            *conditions.get_mut(*c) = ce;
        }

        let body = match node.kind {
            NodeType::Empty => Body::Empty,
            NodeType::List => Body::List(children),
            NodeType::Command => Body::Command(match &node.command {
                None => None,
                Some(call) => Some(CommandCall {
                    name: call.name.clone(),
                    args: call
                        .args
                        .iter()
                        .map(|a| self.expr(id, a))
                        .collect::<Result<_, _>>()?,
                }),
            }),
            NodeType::Assignment => {
                let a = node.assignment.as_ref().ok_or_else(|| CompileError::MissingAssignment {
                    node: format!("{id}"),
                })?;
                let target = self.resolve_var(id, &a.target).ok_or_else(|| {
                    CompileError::UndeclaredTarget {
                        node: format!("{id}"),
                        name: a.target.clone(),
                    }
                })?;
                let expr = self.expr(id, &a.expr)?;
                let want = var_ty(self.vars[&target].ty);
                let got = self.type_of(id, &expr)?;
                if !got.fits(want) {
                    return Err(CompileError::Type {
                        node: format!("{id}"),
                        message: format!(
                            "assigning {} to {} variable `{}`",
                            got.name(),
                            want.name(),
                            a.target
                        ),
                    });
                }
                Body::Assignment { target, expr }
            }
        };

        Ok(NodeSpec {
            id: id.clone(),
            kind: node.kind,
            parent,
            conditions,
            body,
            priority: node.priority.unwrap_or(0),
            declares: node.decls.iter().map(|d| id.child(d.name.clone())).collect(),
        })
    }
}

fn all_finished(children: &[QualifiedName]) -> CExpr {
    let finished = |c: &QualifiedName| {
        Expr::bin(
            BinOp::Eq,
            Expr::NodeStatus(c.clone()),
            Expr::Lit(Value::Str(Status::Finished.keyword().into())),
        )
    };
    let mut it = children.iter();
    match it.next() {
        None => Expr::Lit(Value::Bool(true)),
        Some(first) => it.fold(finished(first), |acc, c| Expr::bin(BinOp::And, acc, finished(c))),
    }
}

