use alloc::string::String;

use crate::simplex::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("variable `{variable}` has lower bound {lower} above upper bound {upper}")]
    InfeasibleBounds {
        variable: String,
        lower: f64,
        upper: f64,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("row `{row}` references unknown variable index {index}")]
    UnknownVariable { row: String, index: usize },
    #[error("invalid number in {context}")]
    InvalidNumber { context: String },
    #[error("expected an optimal solution, got {0:?}")]
    NotOptimal(LpStatus),
    #[error("simplex broke down after {iterations} iterations")]
    SolverFailure { iterations: usize },
    #[error("variable `{variable}` has integral value {value}; nothing to branch on")]
    IntegralValue { variable: String, value: f64 },
    #[error("child has {child} rows, parent has {parent}; expected at most one extra branch row")]
    RowMismatch { parent: usize, child: usize },
    #[error("a file needs at least one case")]
    EmptyFile,
    #[error("file {file} does not improve the bound (gain {gain})")]
    NonImproving { file: usize, gain: f64 },
    #[error("combining LP is unbounded")]
    Unbounded,
    #[error("LP would have {variables} variables, above the limit of {limit}")]
    TooLarge { variables: usize, limit: usize },
    #[error("integer lattice has {size} points, above the limit of {limit}")]
    LatticeTooLarge { size: f64, limit: usize },
    #[error("integer variable `{variable}` has an infinite bound")]
    UnboundedInteger { variable: String },
    #[error("internal error: {0}")]
    Internal(&'static str),
}
