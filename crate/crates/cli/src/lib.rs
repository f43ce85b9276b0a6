//! Command-line driver for the set-relation engine and the plan executive.

pub mod commands;
pub mod corpus;
pub mod events;
pub mod gen;
pub mod suites;
pub mod trace;
