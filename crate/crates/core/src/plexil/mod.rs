//! PLEXIL subset: parser, compiler, rule table and executive.

pub mod ast;
pub mod bridge;
pub mod checks;
pub mod compile;
pub mod eval;
pub mod exec;
pub mod model;
pub mod parse;
pub mod rules;
pub mod value;

pub use compile::{compile, compile_plan, compile_plan_with, CompileError};
pub use exec::{execute, macro_step, micro, quiescence, ExecError, MicroReport, Trace};
pub use model::{ExecutionState, Plan, QualifiedName, UpdateMsg};
pub use parse::{parse_expr, parse_plan};
pub use value::{NodeType, Outcome, Status, Value};
