//! Cutting planes from files.
//!
//! An improving file `f` yields `sum_m Delta^m s_m + sum_n Delta^n x_n >= gain`
//! with `s_m = activity_m(x) - b_m` the surplus of canonical `>=` row `m`.
//! Every integer solution lies in one of the file's children, and there the
//! child's dual point proves the inequality. The root LP optimum violates it
//! by exactly the gain.

use alloc::format;
use alloc::vec::Vec;

use crate::branching::File;
use crate::error::{Error, Result};
use crate::model::{
    merge_coefficients, CanonicalKind, CanonicalModel, CanonicalRow, RIndex, Row, RowKind,
    RowOrigin, Sense,
};
use crate::tol;

/// A cut in slack form.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingCut {
    /// Id of the generating file.
    pub file: usize,
    /// Branching variable of the generating file.
    pub variable: usize,
    /// `(m, Delta^m)` over canonical `>=` rows.
    pub slack: Vec<(usize, f64)>,
    /// `(n, Delta^n)` over structural variables.
    pub variables: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A cut over structural variables only.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedCut {
    pub file: usize,
    /// Canonical `>=` form.
    pub canonical: CanonicalRow,
    /// The same inequality in the original model's sense: `>=` for minimize
    /// models, `<=` for maximize models.
    pub original: Row,
}

impl ExpandedCut {
    /// `lhs - rhs` of the canonical form; negative means violated.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.canonical.slack(x)
    }
}

pub fn generate_cut(file: &File, model: &CanonicalModel) -> Result<BranchingCut> {
    if !(file.gain > tol::GAIN) {
        return Err(Error::NonImproving {
            file: file.id,
            gain: file.gain,
        });
    }
    let mut slack = Vec::new();
    let mut variables = Vec::new();
    for (r, value) in file.delta.iter() {
        if value == 0.0 {
            continue;
        }
        match r {
            RIndex::Row(m) if model.rows()[m].kind == CanonicalKind::Ge => slack.push((m, value)),
            RIndex::Row(_) => {}
            RIndex::Var(n) => variables.push((n, value)),
        }
    }
    Ok(BranchingCut {
        file: file.id,
        variable: file.variable,
        slack,
        variables,
        rhs: file.gain,
    })
}

/// Substitutes every surplus by its row.
pub fn expand_cut(cut: &BranchingCut, model: &CanonicalModel) -> ExpandedCut {
    let mut coefficients = cut.variables.clone();
    let mut rhs = cut.rhs;
    for &(m, delta) in &cut.slack {
        let row = &model.rows()[m];
        coefficients.extend(row.coefficients.iter().map(|&(n, a)| (n, delta * a)));
        rhs += delta * row.rhs;
    }
    let coefficients = merge_coefficients(&coefficients)
        .into_iter()
        .map(|(n, a)| (n, snap(a)))
        .filter(|&(_, a)| a != 0.0)
        .collect::<Vec<_>>();
    let rhs = snap(rhs);
    let id = format!("cut{}", cut.file);
    let original = match model.original_sense {
        Sense::Minimize => Row::new(id.clone(), RowKind::Ge, coefficients.clone(), rhs),
        Sense::Maximize => Row::new(
            id.clone(),
            RowKind::Le,
            coefficients.iter().map(|&(n, a)| (n, -a)).collect(),
            -rhs,
        ),
    };
    ExpandedCut {
        file: cut.file,
        canonical: CanonicalRow {
            id,
            kind: CanonicalKind::Ge,
            coefficients,
            rhs,
            origin: RowOrigin::Cut,
        },
        original,
    }
}

/// Replaces `value` by a nearby fraction with a small denominator if it is
/// one up to rounding noise.
fn snap(value: f64) -> f64 {
    let tolerance = 1e-12 * value.abs().max(1.0);
    for q in 1..=64 {
        let q = q as f64;
        let p = libm::round(value * q);
        if (value - p / q).abs() <= tolerance {
            return p / q;
        }
    }
    value
}

/// Indices of the points violating `cut` by more than `tolerance`.
pub fn verify_cut(cut: &ExpandedCut, points: &[Vec<f64>], tolerance: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, x)| cut.slack(x) < -tolerance)
        .map(|(k, _)| k)
        .collect()
}

/// Generates and expands cuts for every improving file.
pub fn cuts_for_files(files: &[File], model: &CanonicalModel) -> Vec<ExpandedCut> {
    files
        .iter()
        .filter(|f| f.improving)
        .filter_map(|f| generate_cut(f, model).ok())
        .map(|cut| expand_cut(&cut, model))
        .collect()
}
