//! Steiner multicut toolbox: exact solvers for the edge, node and
//! restricted-node deletion variants, brute-force oracles for
//! cross-checking, tree-specific algorithms and kernels, and hardness
//! constructions repurposed as instance generators.

pub mod contract;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod separators;
pub mod sepdp;
pub mod trees;
pub mod twdp;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum SmcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
