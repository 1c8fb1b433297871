//! Library surface of the command-line tool: the expression grammar,
//! the algebra file format, and report rendering. The binary in
//! `main.rs` is a thin argument-handling wrapper over these.

pub mod expr;
pub mod file;
pub mod report;
