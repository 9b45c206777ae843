//! Batch verification toolkit for a block language with Design-by-Contract
//! constructs.
//!
//! The pipeline has two routes over the same [`ast::Program`]:
//!
//! * dynamic: [`rac`] executes programs under full runtime assertion
//!   checking;
//! * static: [`types`] restricts programs to the `{Int, Bool, IntList}`
//!   fragment, [`boogie`] compiles them to Boogie source with a source map
//!   and translates Boogie verdicts back to block-level diagnostics.
//!
//! [`io`] parses and serializes the `.blocks.json` project format and the
//! CLI (`blockverify`) wires everything together.

pub mod ast;
pub mod boogie;
pub mod build;
pub mod corpus;
pub mod diag;
pub mod io;
pub mod rac;
pub mod types;
