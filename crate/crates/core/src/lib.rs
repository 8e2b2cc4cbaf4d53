//! Bound strengthening for mixed-integer linear programs by branching
//! concurrently.
//!
//! Every branching candidate is split into two child LPs that are solved once
//! each. The change of every dual value and reduced cost between the root and a
//! child is that child's *delta*; the children of one candidate form a *file*.
//! A small auxiliary LP then decides how strongly each file may be applied at
//! the same time without driving any root dual negative, which yields a lower
//! bound above the LP relaxation. Every improving file also defines a valid
//! cutting plane in the primal space.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the `conbranch` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod branching;
pub mod combining;
pub mod cutgen;
mod dual;
pub mod error;
pub mod heuristics;
pub mod model;
pub mod oracle;
pub mod simplex;
pub mod tol;

pub use branching::{BranchDirection, BranchOptions, Case, Differentiation, File};
pub use combining::{AnchorColumn, ColumnKey, CombineResult};
pub use error::{Error, Result};
pub use model::{
    canonicalize, l_vector, CanonicalKind, CanonicalModel, CanonicalRow, CanonicalVariable,
    Model, RIndex, RVector, Row, RowKind, RowOrigin, Sense, Variable,
};
pub use simplex::{objective_gain, solve_lp, Basis, ColumnId, LpSolution, LpStatus};
