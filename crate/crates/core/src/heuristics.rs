//! Optional passes that shape primal and dual points before combining.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::branching::{is_fractional, Case};
use crate::dual::{append_dual_block, dual_objective_terms, solve_model};
use crate::error::{Error, Result};
use crate::model::{
    CanonicalKind, CanonicalModel, CanonicalRow, CanonicalVariable, DeltaVector, LVector, Model,
    RIndex, RVector, Row, RowKind, RowOrigin, Sense, Variable,
};
use crate::simplex::{objective_gain, solve_lp, LpSolution};
use crate::tol;

pub const DEFAULT_DISTANCE_FLOOR: f64 = 0.01;

/// Price of consuming one unit of each stock entry: `max(1/l_r, floor)`, or
/// `floor` where the stock is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceWeights {
    pub weights: RVector,
    pub floor: f64,
}

impl DistanceWeights {
    pub fn new(l: &LVector, floor: f64) -> Self {
        let weights = l
            .iter()
            .map(|(r, lr)| {
                let d = if lr > tol::FEASIBILITY {
                    (1.0 / lr).max(floor)
                } else {
                    floor
                };
                (r, d)
            })
            .collect();
        Self { weights, floor }
    }

    /// `sum_r d_r max(0, Delta^r)` over the stock entries.
    pub fn distance(&self, delta: &DeltaVector) -> f64 {
        self.weights
            .iter()
            .map(|(r, d)| d * delta.get(r).max(0.0))
            .sum()
    }

    /// Gain per unit of distance; infinite for a positive gain at no distance.
    pub fn efficiency(&self, case: &Case) -> f64 {
        let distance = self.distance(&case.delta);
        if distance > tol::GAIN {
            case.gain / distance
        } else if case.gain > tol::GAIN {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Re-solves a case in dual space, trading gain against distance at the
/// first pass's exchange rate. The result is at least as efficient as the
/// input. Cases with no positive distance or no positive gain pass through.
pub fn refined_case_solve(
    parent: &LpSolution,
    model: &CanonicalModel,
    case: &Case,
    weights: &DistanceWeights,
) -> Result<Case> {
    let first_gain = objective_gain(parent, &case.child);
    let first_distance = weights.distance(&crate::branching::case_delta(parent, &case.child, model)?);
    if first_distance <= tol::GAIN || first_gain <= tol::GAIN {
        return Ok(case.clone());
    }
    let rate = first_gain / first_distance;
    let child = case.child_model(model);

    let mut lp = Model::new("refine", Sense::Maximize);
    let offset = append_dual_block(&mut lp, &child, "", 1.0)?;
    lp.add_row(Row::new(
        "gain",
        RowKind::Ge,
        dual_objective_terms(&child, offset),
        parent.objective,
    ))?;
    for (r, d) in weights.weights.iter() {
        let RIndex::Row(m) = r else { continue };
        if model.rows()[m].kind != CanonicalKind::Ge {
            continue;
        }
        // z_m >= y_m - y'_m
        let z = lp.add_variable(Variable::continuous(format!("z{m}"), 0.0, f64::INFINITY, -rate * d))?;
        lp.add_row(Row::new(
            format!("dist{m}"),
            RowKind::Ge,
            vec![(z, 1.0), (offset + m, 1.0)],
            parent.y[m],
        ))?;
    }
    let (_, solution) = solve_model(&lp)?;
    if !solution.is_optimal() {
        return Ok(case.clone());
    }
    let point = solution.x[offset..offset + child.num_rows()].to_vec();
    let refined = Case::new(
        case.file,
        case.index,
        case.row.clone(),
        parent,
        LpSolution::from_dual(&child, point),
        model,
    )?;
    if refined.gain <= tol::GAIN {
        return Ok(case.clone());
    }
    Ok(refined)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrityOptions {
    /// Use `1 + 2 frac` instead of `1 - 2 frac`.
    pub literal: bool,
    /// Boxes are built around `floor(x - epsilon)`.
    pub epsilon: f64,
}

impl Default for IntegrityOptions {
    fn default() -> Self {
        Self {
            literal: false,
            epsilon: 0.0,
        }
    }
}

/// `1 - 2 frac(x0_n)` per integer variable, zero for continuous ones.
pub fn integrity_objective(x0: &[f64], model: &CanonicalModel, literal: bool) -> Vec<f64> {
    model
        .variables()
        .iter()
        .zip(x0)
        .map(|(v, &x)| {
            if !v.integer {
                return 0.0;
            }
            let frac = x - libm::floor(x);
            if literal {
                1.0 + 2.0 * frac
            } else {
                1.0 - 2.0 * frac
            }
        })
        .collect()
}

pub fn fractional_count(x: &[f64], model: &CanonicalModel) -> usize {
    model
        .variables()
        .iter()
        .zip(x)
        .filter(|(v, &value)| v.integer && is_fractional(value))
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityResult {
    pub x: Vec<f64>,
    pub fractional: usize,
    /// LPs solved.
    pub iterations: usize,
}

/// Moves the root optimum within the optimal face towards integrality: the
/// objective is frozen, every integer variable is boxed to the unit interval
/// around its value and the integrity objective is minimized. Stops as soon
/// as the number of fractional variables does not drop.
pub fn integrity_search(
    model: &CanonicalModel,
    root: &LpSolution,
    max_iters: usize,
    options: &IntegrityOptions,
) -> Result<IntegrityResult> {
    if !root.is_optimal() {
        return Err(Error::NotOptimal(root.status));
    }
    let mut best = IntegrityResult {
        x: root.x.clone(),
        fractional: fractional_count(&root.x, model),
        iterations: 0,
    };
    let frozen = CanonicalRow {
        id: "frozen-objective".into(),
        kind: CanonicalKind::Ge,
        coefficients: model
            .variables()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.cost != 0.0)
            .map(|(n, v)| (n, -v.cost))
            .collect(),
        rhs: -(root.objective + tol::FEASIBILITY * (1.0 + root.objective.abs())),
        origin: RowOrigin::Added,
    };
    for _ in 0..max_iters {
        if best.fractional == 0 {
            break;
        }
        let costs = integrity_objective(&best.x, model, options.literal);
        let mut rows = vec![frozen.clone()];
        for (n, v) in model.variables().iter().enumerate() {
            if !v.integer {
                continue;
            }
            let low = libm::floor(best.x[n] - options.epsilon);
            rows.push(box_row(format!("box{n}.lo"), n, 1.0, low));
            rows.push(box_row(format!("box{n}.up"), n, -1.0, -(low + 1.0)));
        }
        let variables: Vec<CanonicalVariable> = model
            .variables()
            .iter()
            .zip(&costs)
            .map(|(v, &c)| CanonicalVariable { cost: c, ..v.clone() })
            .collect();
        let restricted = CanonicalModel::from_parts(
            format!("{}-integrity", model.name),
            model.original_sense,
            variables,
            model.rows().to_vec(),
        )
        .with_rows(rows);
        let solution = solve_lp(&restricted, None)?;
        best.iterations += 1;
        if !solution.is_optimal() {
            return Err(Error::Internal("integrity LP has no optimum"));
        }
        let fractional = fractional_count(&solution.x, model);
        if fractional >= best.fractional {
            break;
        }
        best.x = solution.x;
        best.fractional = fractional;
    }
    Ok(best)
}

fn box_row(id: alloc::string::String, n: usize, sign: f64, rhs: f64) -> CanonicalRow {
    CanonicalRow {
        id,
        kind: CanonicalKind::Ge,
        coefficients: vec![(n, sign)],
        rhs,
        origin: RowOrigin::Added,
    }
}
