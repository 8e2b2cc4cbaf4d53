//! Dual-space LPs: models whose variables are the dual values of a canonical
//! model's rows.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{canonicalize, CanonicalKind, CanonicalModel, Model, Row, RowKind, Sense, Variable};
use crate::simplex::{solve_lp, LpSolution};

/// Appends one dual variable per row of `primal` (nonnegative for `>=` rows,
/// free for `=` rows) together with the dual constraints
/// `sum_m a_mn y_m = c_n`. Variables are free in canonical form, so every dual
/// constraint is an equality. Returns the index of the first new variable.
pub(crate) fn append_dual_block(
    target: &mut Model,
    primal: &CanonicalModel,
    prefix: &str,
    objective_scale: f64,
) -> Result<usize> {
    let offset = target.variables().len();
    for (m, row) in primal.rows().iter().enumerate() {
        let lower = match row.kind {
            CanonicalKind::Ge => 0.0,
            CanonicalKind::Eq => f64::NEG_INFINITY,
        };
        target.add_variable(Variable::continuous(
            format!("{prefix}y{m}"),
            lower,
            f64::INFINITY,
            objective_scale * row.rhs,
        ))?;
    }
    for (n, column) in primal.columns().into_iter().enumerate() {
        let coefficients = column.into_iter().map(|(m, a)| (offset + m, a)).collect();
        target.add_row(Row::new(
            format!("{prefix}c{n}"),
            RowKind::Eq,
            coefficients,
            primal.variables()[n].cost,
        ))?;
    }
    Ok(offset)
}

/// `sum_m b_m y_m` as coefficients on a dual block starting at `offset`.
pub(crate) fn dual_objective_terms(primal: &CanonicalModel, offset: usize) -> Vec<(usize, f64)> {
    primal
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| row.rhs != 0.0)
        .map(|(m, row)| (offset + m, row.rhs))
        .collect()
}

pub(crate) fn solve_model(model: &Model) -> Result<(CanonicalModel, LpSolution)> {
    let canonical = canonicalize(model)?;
    let solution = solve_lp(&canonical, None)?;
    Ok((canonical, solution))
}

/// Among the optimal duals of `solution`, picks one with the smallest sum of
/// `>=`-row duals. Falls back to `solution` if the secondary LP fails.
pub(crate) fn minimal_sum_duals(primal: &CanonicalModel, solution: &LpSolution) -> Result<LpSolution> {
    let mut model = Model::new("polish", Sense::Minimize);
    let offset = append_dual_block(&mut model, primal, "", 0.0)?;
    for (m, row) in primal.rows().iter().enumerate() {
        if row.kind == CanonicalKind::Ge {
            model.set_objective(offset + m, 1.0);
        }
    }
    let target = solution.objective;
    model.add_row(Row::new(
        "optimal-face",
        RowKind::Eq,
        dual_objective_terms(primal, offset),
        target,
    ))?;
    let (_, polished) = solve_model(&model)?;
    if !polished.is_optimal() {
        return Ok(solution.clone());
    }
    let y: Vec<f64> = polished.x[offset..offset + primal.num_rows()].to_vec();
    let reduced = primal.reduced_costs(&y);
    Ok(LpSolution {
        y,
        reduced,
        ..solution.clone()
    })
}
