//! Circuit description language and the acceptance suite behind the `quadsim` tool.

mod dsl;
mod verify;

pub use dsl::{parse, print, Diagnostic, DslProgram, Severity, Statement, MAX_DECLARED};
pub use verify::{criterion, fuzz_parser, verify_all, CriterionResult, TITLES, TOL};
