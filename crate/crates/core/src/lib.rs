//! Synchronous set relations on top of an asynchronous set-rewriting core.
//!
//! The crate has three layers:
//!
//! * [`term`] and [`rewrite`]: ground terms, finite term sets (equality modulo
//!   associativity, commutativity, identity and idempotence of union), rewrite
//!   rules over sets and the relation a rule system defines by substitution
//!   closure.
//! * [`setrel`]: relation combinators (n-fold composition, bounded closure,
//!   normalized reduction, asynchronous/parallel/synchronous extensions), the
//!   maximal-redexes strategy, the log-book serialization procedure, and
//!   brute-force oracles for soundness, completeness and determinism.
//! * [`plexil`]: a PLEXIL-subset front end (plan syntax, expressions with
//!   three-valued logic, compilation to an execution state) and the
//!   prioritized atomic/micro/quiescence/macro relations.
//!
//! Everything here is pure and `no_std` (with `alloc`); file IO and the
//! command line live in the `syncrel` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod lex;
pub mod plexil;
pub mod rewrite;
pub mod setrel;
pub mod term;

pub use lex::ParseError;
pub use rewrite::{RewriteRelation, RewriteRule, RewriteSystem};
pub use setrel::{SetRelError, SetRelation};
pub use term::{Term, TermSet};
