//! Generic ontology design patterns: parse pattern libraries, expand
//! instantiations into flat ontologies and emit them as Manchester-style text.

// Errors carry names and positions; they are built only on failure paths.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod diag;
pub mod elaborate;
pub mod emit;
pub mod instantiate;
pub mod model;
pub mod syntax;
