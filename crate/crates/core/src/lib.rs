//! Compiler, exact verifier, trajectory scheduler and cost model for logical CZ
//! gates mediated by moving messenger atoms in a Rydberg tweezer array.

pub mod arch;
pub mod cli;
pub mod config;
pub mod cost;
pub mod ir;
pub mod oracle;
pub mod schedule;
