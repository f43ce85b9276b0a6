//! Plan syntax trees and their printer.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::value::{NodeType, Outcome, Status, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "OR",
            BinOp::And => "AND",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    /// Binding strength; higher binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    pub(crate) fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

const NOT_PREC: u8 = 3;
const ATOM_PREC: u8 = 7;

/// An expression over names of type `N`: plain identifiers in a parsed plan,
/// resolved references after compilation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr<N> {
    Lit(Value),
    Var(N),
    NodeStatus(N),
    NodeOutcome(N),
    /// Read an external name; `LookupOnChange` and `Lookup` both parse to this.
    Lookup(String),
    Not(Box<Expr<N>>),
    Bin(BinOp, Box<Expr<N>>, Box<Expr<N>>),
}

impl<N> Expr<N> {
    pub fn bin(op: BinOp, l: Expr<N>, r: Expr<N>) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr<N>) -> Self {
        Expr::Not(Box::new(e))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Not(_) => NOT_PREC,
            Expr::Lit(Value::Int(n)) if *n < 0 => NOT_PREC,
            _ => ATOM_PREC,
        }
    }

    /// Rewrites every name, keeping the shape.
    pub fn try_map<M, E>(&self, f: &mut impl FnMut(NameUse, &N) -> Result<M, E>) -> Result<Expr<M>, E> {
        Ok(match self {
            Expr::Lit(v) => Expr::Lit(v.clone()),
            Expr::Var(n) => Expr::Var(f(NameUse::Variable, n)?),
            Expr::NodeStatus(n) => Expr::NodeStatus(f(NameUse::Node, n)?),
            Expr::NodeOutcome(n) => Expr::NodeOutcome(f(NameUse::Node, n)?),
            Expr::Lookup(s) => Expr::Lookup(s.clone()),
            Expr::Not(e) => Expr::Not(Box::new(e.try_map(f)?)),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.try_map(f)?), Box::new(r.try_map(f)?)),
        })
    }
}

/// What a name inside an expression refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameUse {
    Variable,
    Node,
}

fn fmt_child<N: fmt::Display>(e: &Expr<N>, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl<N: fmt::Display> fmt::Display for Expr<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(Value::Str(s))
                if Status::from_keyword(s).is_some() || Outcome::from_keyword(s).is_some() =>
            {
                f.write_str(s)
            }
            Expr::Lit(Value::Unknown) => f.write_str("UNKNOWN"),
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::NodeStatus(n) => write!(f, "{n}.status"),
            Expr::NodeOutcome(n) => write!(f, "{n}.outcome"),
            Expr::Lookup(s) => write!(f, "LookupOnChange({s})"),
            Expr::Not(e) => {
                f.write_str("NOT ")?;
                fmt_child(e, NOT_PREC, f)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                // comparisons do not chain; arithmetic and logic are left-associative
                let left_min = if op.is_comparison() { p + 1 } else { p };
                fmt_child(l, left_min, f)?;
                write!(f, " {} ", op.symbol())?;
                fmt_child(r, p + 1, f)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cond {
    Start,
    Skip,
    Repeat,
    End,
    Pre,
    Post,
    Inv,
}

impl Cond {
    pub const ALL: [Cond; 7] = [
        Cond::Start,
        Cond::Skip,
        Cond::Repeat,
        Cond::End,
        Cond::Pre,
        Cond::Post,
        Cond::Inv,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Cond::Start => "Start",
            Cond::Skip => "Skip",
            Cond::Repeat => "Repeat-while",
            Cond::End => "End",
            Cond::Pre => "Pre",
            Cond::Post => "Post",
            Cond::Inv => "Inv",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == s)
    }

    pub fn field(self) -> &'static str {
        match self {
            Cond::Start => "start",
            Cond::Skip => "skip",
            Cond::Repeat => "repeat",
            Cond::End => "end",
            Cond::Pre => "pre",
            Cond::Post => "post",
            Cond::Inv => "inv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarType {
    Int,
    Bool,
}

impl VarType {
    pub fn keyword(self) -> &'static str {
        match self {
            VarType::Int => "int",
            VarType::Bool => "bool",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub ty: VarType,
    pub name: String,
    pub init: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandCall<N> {
    pub name: String,
    pub args: Vec<Expr<N>>,
}

impl<N: fmt::Display> fmt::Display for CommandCall<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentAst {
    pub target: String,
    pub expr: Expr<String>,
}

/// One node of a parsed plan. Conditions keep source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAst {
    pub kind: NodeType,
    pub name: String,
    pub decls: Vec<Decl>,
    pub conditions: Vec<(Cond, Expr<String>)>,
    pub command: Option<CommandCall<String>>,
    pub assignment: Option<AssignmentAst>,
    pub priority: Option<u64>,
    pub children: Vec<NodeAst>,
}

impl NodeAst {
    pub fn new(kind: NodeType, name: impl Into<String>) -> Self {
        NodeAst {
            kind,
            name: name.into(),
            decls: Vec::new(),
            conditions: Vec::new(),
            command: None,
            assignment: None,
            priority: None,
            children: Vec::new(),
        }
    }

    pub fn condition(&self, c: Cond) -> Option<&Expr<String>> {
        self.conditions.iter().find(|(k, _)| *k == c).map(|(_, e)| e)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = |f: &mut fmt::Formatter<'_>, d: usize| -> fmt::Result {
            for _ in 0..d {
                f.write_str("  ")?;
            }
            Ok(())
        };
        pad(f, depth)?;
        writeln!(f, "{} {} {{", self.kind, self.name)?;
        for d in &self.decls {
            pad(f, depth + 1)?;
            writeln!(f, "{} {} = {};", d.ty.keyword(), d.name, Expr::<String>::Lit(d.init.clone()))?;
        }
        for (c, e) in &self.conditions {
            pad(f, depth + 1)?;
            writeln!(f, "{}: {e};", c.keyword())?;
        }
        if let Some(c) = &self.command {
            pad(f, depth + 1)?;
            writeln!(f, "Command: {c};")?;
        }
        if let Some(a) = &self.assignment {
            pad(f, depth + 1)?;
            writeln!(f, "Assignment: {} := {};", a.target, a.expr)?;
        }
        if let Some(p) = self.priority {
            pad(f, depth + 1)?;
            writeln!(f, "Priority: {p};")?;
        }
        for c in &self.children {
            c.write(f, depth + 1)?;
        }
        pad(f, depth)?;
        writeln!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanAst {
    pub root: NodeAst,
}

impl fmt::Display for NodeAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Display for PlanAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f, 0)
    }
}
