//! Case differentiations on fractional integer variables and their delta
//! vectors.
//!
//! A *case* is one child LP of a branching, evaluated at one dual point. Its
//! delta records, for every `>=` row and every structural variable, how much
//! the child point consumed of the root's dual value or reduced cost. A *file*
//! groups the cases of one branching: its delta is the entrywise maximum over
//! the cases and its gain the minimum.

use alloc::format;
use alloc::vec::Vec;

use crate::dual::minimal_sum_duals;
use crate::error::{Error, Result};
use crate::model::{CanonicalKind, CanonicalModel, CanonicalRow, DeltaVector, RIndex, RowOrigin};
use crate::simplex::{objective_gain, solve_lp, LpSolution, LpStatus};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchDirection {
    /// `x <= floor(q)`
    Down,
    /// `x >= floor(q) + 1`
    Up,
}

/// Which optimal dual point of a child LP to use when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualChoice {
    /// Whatever vertex the simplex stops at.
    Vertex,
    /// The optimal dual with the smallest sum over `>=` rows.
    MinimalSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions {
    pub warm_start: bool,
    pub normalize: bool,
    pub duals: DualChoice,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            warm_start: true,
            normalize: true,
            duals: DualChoice::Vertex,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub file: usize,
    pub index: usize,
    pub variable: usize,
    pub direction: BranchDirection,
    /// The appended branch row in canonical `>=` form.
    pub row: CanonicalRow,
    /// Child dual point the delta was measured at.
    pub child: LpSolution,
    pub delta: DeltaVector,
    pub gain: f64,
    /// Factor applied to the dual displacement by normalization (1 if none).
    pub scale: f64,
}

impl Case {
    pub fn new(
        file: usize,
        index: usize,
        row: CanonicalRow,
        parent: &LpSolution,
        child: LpSolution,
        model: &CanonicalModel,
    ) -> Result<Self> {
        let (variable, direction) = branch_of(&row);
        let delta = case_delta(parent, &child, model)?;
        let gain = objective_gain(parent, &child);
        Ok(Self {
            file,
            index,
            variable,
            direction,
            row,
            child,
            delta,
            gain,
            scale: 1.0,
        })
    }

    /// The child model this case was solved on.
    pub fn child_model(&self, parent: &CanonicalModel) -> CanonicalModel {
        parent.with_row(self.row.clone())
    }

    fn scale_by(&mut self, factor: f64) {
        self.delta = self.delta.scaled(factor);
        self.gain *= factor;
        self.scale *= factor;
    }
}

fn branch_of(row: &CanonicalRow) -> (usize, BranchDirection) {
    let (n, a) = row.coefficients.first().copied().unwrap_or((0, 1.0));
    let variable = match row.origin {
        RowOrigin::Branch { variable } => variable,
        _ => n,
    };
    let direction = if a < 0.0 {
        BranchDirection::Down
    } else {
        BranchDirection::Up
    };
    (variable, direction)
}

#[derive(Debug, Clone, PartialEq)]
pub struct File {
    pub id: usize,
    pub variable: usize,
    pub cases: Vec<Case>,
    pub delta: DeltaVector,
    pub gain: f64,
    pub normalized: bool,
    /// `gain > 0`; only improving files enter a combining LP.
    pub improving: bool,
}

/// Outcome of branching on one variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Differentiation {
    File(File),
    /// One child is infeasible: `row` (the other branch) holds for every
    /// integer solution and may be added to the root permanently.
    Fixing { variable: usize, row: CanonicalRow },
    /// Both children are infeasible, so no integer solution exists.
    Infeasible { variable: usize },
}

pub fn is_fractional(value: f64) -> bool {
    (value - libm::round(value)).abs() > tol::INTEGRALITY
}

/// Integer variables whose value is farther than the integrality tolerance
/// from the nearest integer, in model order.
pub fn fractional_candidates(solution: &LpSolution, model: &CanonicalModel) -> Vec<usize> {
    model
        .variables()
        .iter()
        .enumerate()
        .filter(|&(n, v)| v.integer && is_fractional(solution.x[n]))
        .map(|(n, _)| n)
        .collect()
}

pub fn branch_row(
    model: &CanonicalModel,
    variable: usize,
    direction: BranchDirection,
    floor: f64,
) -> CanonicalRow {
    let id = &model.variables()[variable].id;
    let (id, coefficient, rhs) = match direction {
        BranchDirection::Down => (format!("{id}<={floor}"), -1.0, -floor),
        BranchDirection::Up => (format!("{id}>={}", floor + 1.0), 1.0, floor + 1.0),
    };
    CanonicalRow {
        id,
        kind: CanonicalKind::Ge,
        coefficients: alloc::vec![(variable, coefficient)],
        rhs,
        origin: RowOrigin::Branch { variable },
    }
}

/// The down and up child models for branching `variable` at `value`.
pub fn make_case_models(
    model: &CanonicalModel,
    variable: usize,
    value: f64,
) -> Result<(CanonicalModel, CanonicalModel)> {
    if !is_fractional(value) {
        return Err(Error::IntegralValue {
            variable: model.variables()[variable].id.clone(),
            value,
        });
    }
    let floor = libm::floor(value);
    Ok((
        model.with_row(branch_row(model, variable, BranchDirection::Down, floor)),
        model.with_row(branch_row(model, variable, BranchDirection::Up, floor)),
    ))
}

/// `Delta^m = y_m - y'_m` for every parent row and
/// `Delta^n = r_n(y) - r_n(y')` for every structural variable. The child may
/// carry one extra (branch) row; its dual enters only through `r_n(y')`.
pub fn case_delta(
    parent: &LpSolution,
    child: &LpSolution,
    model: &CanonicalModel,
) -> Result<DeltaVector> {
    let rows = model.num_rows();
    if parent.y.len() != rows || (child.y.len() != rows && child.y.len() != rows + 1) {
        return Err(Error::RowMismatch {
            parent: parent.y.len(),
            child: child.y.len(),
        });
    }
    let row_deltas = (0..rows).map(|m| (RIndex::Row(m), parent.y[m] - child.y[m]));
    let var_deltas = (0..model.num_variables())
        .map(|n| (RIndex::Var(n), parent.reduced[n] - child.reduced[n]));
    Ok(row_deltas.chain(var_deltas).collect())
}

/// Aggregates cases into a file, normalizing them to a common gain first if
/// asked to and every gain is positive.
pub fn build_file(mut cases: Vec<Case>, normalize: bool) -> Result<File> {
    let first = cases.first().ok_or(Error::EmptyFile)?;
    let (id, variable) = (first.file, first.variable);
    let min_gain = cases.iter().map(|c| c.gain).fold(f64::INFINITY, f64::min);
    let improving = min_gain > tol::GAIN;
    let normalized = normalize && improving;
    if normalized {
        for case in &mut cases {
            let factor = min_gain / case.gain;
            case.scale_by(factor);
        }
    }
    let mut delta = cases[0].delta.clone();
    for case in &cases[1..] {
        delta.max_with(&case.delta);
    }
    Ok(File {
        id,
        variable,
        cases,
        delta,
        gain: if improving { min_gain } else { min_gain.max(0.0) },
        normalized,
        improving,
    })
}

/// Solves one child, polishing its duals if requested.
pub fn solve_child(
    child: &CanonicalModel,
    root: &LpSolution,
    options: &BranchOptions,
) -> Result<LpSolution> {
    let start = if options.warm_start {
        root.basis.as_ref()
    } else {
        None
    };
    let solution = solve_lp(child, start)?;
    if solution.status == LpStatus::Optimal && options.duals == DualChoice::MinimalSum {
        return minimal_sum_duals(child, &solution);
    }
    Ok(solution)
}

/// Branches on `variable` of the root: solves both children once and forms
/// the file, or reports a fixing when a child is infeasible.
pub fn differentiate(
    model: &CanonicalModel,
    root: &LpSolution,
    file: usize,
    variable: usize,
    options: &BranchOptions,
) -> Result<Differentiation> {
    if !root.is_optimal() {
        return Err(Error::NotOptimal(root.status));
    }
    let value = root.x[variable];
    let (down, up) = make_case_models(model, variable, value)?;
    let down_sol = solve_child(&down, root, options)?;
    let up_sol = solve_child(&up, root, options)?;
    let rows = model.num_rows();
    match (down_sol.status, up_sol.status) {
        (LpStatus::Infeasible, LpStatus::Infeasible) => {
            return Ok(Differentiation::Infeasible { variable })
        }
        (LpStatus::Infeasible, _) => {
            return Ok(Differentiation::Fixing {
                variable,
                row: up.rows()[rows].clone(),
            })
        }
        (_, LpStatus::Infeasible) => {
            return Ok(Differentiation::Fixing {
                variable,
                row: down.rows()[rows].clone(),
            })
        }
        (LpStatus::Unbounded, _) | (_, LpStatus::Unbounded) => {
            return Err(Error::NotOptimal(LpStatus::Unbounded))
        }
        _ => {}
    }
    let cases = alloc::vec![
        Case::new(file, 0, down.rows()[rows].clone(), root, down_sol, model)?,
        Case::new(file, 1, up.rows()[rows].clone(), root, up_sol, model)?,
    ];
    Ok(Differentiation::File(build_file(cases, options.normalize)?))
}
