//! Expression evaluation `(Γ, π) ⊢ e ⇝ v` with Kleene three-valued logic.

use alloc::format;
use alloc::string::String;

use super::ast::{BinOp, Expr};
use super::model::{CExpr, ExecutionState, QualifiedName};
use super::value::{kleene_and, kleene_not, kleene_or, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("`{op}` applied to {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: &'static str,
        right: &'static str,
    },
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
    #[error("no object `{0}`")]
    UnknownObject(String),
}

/// Evaluate a compiled expression in the given state. Comparisons and
/// arithmetic with Unknown yield Unknown; mixing concrete types is an error.
pub fn eval(state: &ExecutionState, e: &CExpr) -> Result<Value, EvalError> {
    match e {
        Expr::Lit(v) => Ok(v.clone()),
        Expr::Lookup(name) => Ok(state.external.get(name).cloned().unwrap_or(Value::Unknown)),
        Expr::Var(id) => state
            .variables
            .get(id)
            .map(|v| v.actval.clone())
            .ok_or_else(|| missing(id)),
        Expr::NodeStatus(id) => state
            .nodes
            .get(id)
            .map(|n| Value::Str(n.status.keyword().into()))
            .ok_or_else(|| missing(id)),
        Expr::NodeOutcome(id) => state
            .nodes
            .get(id)
            .map(|n| Value::Str(n.outcome.keyword().into()))
            .ok_or_else(|| missing(id)),
        Expr::Not(inner) => {
            let v = eval(state, inner)?;
            kleene_not(&v).ok_or(EvalError::TypeMismatch {
                op: "NOT",
                left: v.type_name(),
                right: v.type_name(),
            })
        }
        Expr::Bin(op, l, r) => {
            // AND/OR short-circuit on their absorbing element
            let lv = eval(state, l)?;
            match (op, &lv) {
                (BinOp::And, Value::Bool(false)) => return Ok(lv),
                (BinOp::Or, Value::Bool(true)) => return Ok(lv),
                _ => {}
            }
            let rv = eval(state, r)?;
            binary(*op, &lv, &rv)
        }
    }
}

fn missing(id: &QualifiedName) -> EvalError {
    EvalError::UnknownObject(format!("{id}"))
}

pub(crate) fn binary(op: BinOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    let mismatch = || EvalError::TypeMismatch {
        op: op.symbol(),
        left: l.type_name(),
        right: r.type_name(),
    };
    match op {
        BinOp::And => kleene_and(l, r).ok_or_else(mismatch),
        BinOp::Or => kleene_or(l, r).ok_or_else(mismatch),
        BinOp::Eq | BinOp::Ne => {
            if l.is_unknown() || r.is_unknown() {
                return Ok(Value::Unknown);
            }
            if core::mem::discriminant(l) != core::mem::discriminant(r) {
                return Err(mismatch());
            }
            Ok(Value::Bool((l == r) == (op == BinOp::Eq)))
        }
        _ => {
            let (a, b) = match (l, r) {
                (Value::Int(a), Value::Int(b)) => (*a, *b),
                (Value::Int(_) | Value::Unknown, Value::Int(_) | Value::Unknown) => {
                    return Ok(Value::Unknown)
                }
                _ => return Err(mismatch()),
            };
            let overflow = || EvalError::Overflow(op.symbol());
            Ok(match op {
                BinOp::Lt => Value::Bool(a < b),
                BinOp::Gt => Value::Bool(a > b),
                BinOp::Le => Value::Bool(a <= b),
                BinOp::Ge => Value::Bool(a >= b),
                BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
                BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
                BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
                _ => unreachable!("logical and equality operators handled above"),
            })
        }
    }
}

/// False if some proper ancestor's invariant is false, true if all are
/// true, Unknown otherwise. True for the root.
pub fn anc_inv(state: &ExecutionState, node: &QualifiedName) -> Result<Value, EvalError> {
    let mut acc = Value::Bool(true);
    for a in state.plan.ancestors(node) {
        let v = eval(state, &a.conditions.inv)?;
        acc = kleene_and(&acc, &v).ok_or(EvalError::TypeMismatch {
            op: "AncInv",
            left: "bool",
            right: v.type_name(),
        })?;
        if acc.is_false() {
            break;
        }
    }
    Ok(acc)
}

/// True if some proper ancestor's end condition is true, false if all are
/// false, Unknown otherwise. False for the root.
pub fn anc_end(state: &ExecutionState, node: &QualifiedName) -> Result<Value, EvalError> {
    let mut acc = Value::Bool(false);
    for a in state.plan.ancestors(node) {
        let v = eval(state, &a.conditions.end)?;
        acc = kleene_or(&acc, &v).ok_or(EvalError::TypeMismatch {
            op: "AncEnd",
            left: "bool",
            right: v.type_name(),
        })?;
        if acc.is_true() {
            break;
        }
    }
    Ok(acc)
}
