//! MILP data model, the canonical minimize / `>=` form and the index space
//! shared by dual values and reduced costs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::simplex::{LpSolution, LpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub integer: bool,
}

impl Variable {
    pub fn continuous(id: impl Into<String>, lower: f64, upper: f64, objective: f64) -> Self {
        Self {
            id: id.into(),
            lower,
            upper,
            objective,
            integer: false,
        }
    }

    pub fn integer(id: impl Into<String>, lower: f64, upper: f64, objective: f64) -> Self {
        Self {
            integer: true,
            ..Self::continuous(id, lower, upper, objective)
        }
    }

    pub fn binary(id: impl Into<String>, objective: f64) -> Self {
        Self::integer(id, 0.0, 1.0, objective)
    }
}

/// A linear constraint. Coefficients reference variables by position.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: String,
    pub kind: RowKind,
    pub coefficients: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    pub fn new(
        id: impl Into<String>,
        kind: RowKind,
        coefficients: Vec<(usize, f64)>,
        rhs: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind,
            coefficients,
            rhs,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().map(|&(n, a)| a * x[n]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub sense: Sense,
    variables: Vec<Variable>,
    rows: Vec<Row>,
    variable_ids: BTreeMap<String, usize>,
    row_ids: BTreeMap<String, usize>,
}

impl Model {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        Self {
            name: name.into(),
            sense,
            variables: Vec::new(),
            rows: Vec::new(),
            variable_ids: BTreeMap::new(),
            row_ids: BTreeMap::new(),
        }
    }

    pub fn add_variable(&mut self, variable: Variable) -> Result<usize> {
        if variable.lower.is_nan() || variable.upper.is_nan() || !variable.objective.is_finite() {
            return Err(Error::InvalidNumber {
                context: format!("variable `{}`", variable.id),
            });
        }
        if self.variable_ids.contains_key(&variable.id) {
            return Err(Error::DuplicateId {
                kind: "variable",
                id: variable.id,
            });
        }
        let index = self.variables.len();
        self.variable_ids.insert(variable.id.clone(), index);
        self.variables.push(variable);
        Ok(index)
    }

    pub fn add_row(&mut self, row: Row) -> Result<usize> {
        if self.row_ids.contains_key(&row.id) {
            return Err(Error::DuplicateId {
                kind: "row",
                id: row.id,
            });
        }
        if let Some(&(index, _)) = row
            .coefficients
            .iter()
            .find(|&&(n, _)| n >= self.variables.len())
        {
            return Err(Error::UnknownVariable { row: row.id, index });
        }
        if !row.rhs.is_finite() || row.coefficients.iter().any(|&(_, a)| !a.is_finite()) {
            return Err(Error::InvalidNumber {
                context: format!("row `{}`", row.id),
            });
        }
        let index = self.rows.len();
        self.row_ids.insert(row.id.clone(), index);
        self.rows.push(row);
        Ok(index)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn variable_index(&self, id: &str) -> Option<usize> {
        self.variable_ids.get(id).copied()
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.row_ids.get(id).copied()
    }

    pub fn set_objective(&mut self, variable: usize, coefficient: f64) {
        self.variables[variable].objective = coefficient;
    }

    pub fn set_bounds(&mut self, variable: usize, lower: f64, upper: f64) {
        self.variables[variable].lower = lower;
        self.variables[variable].upper = upper;
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(x)
            .map(|(v, &value)| v.objective * value)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalKind {
    Ge,
    Eq,
}

/// Where a canonical row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOrigin {
    /// Original constraint; `negated` is set for `<=` rows flipped to `>=`.
    Constraint { row: usize, negated: bool },
    LowerBound(usize),
    UpperBound(usize),
    Branch { variable: usize },
    Cut,
    Added,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalRow {
    pub id: String,
    pub kind: CanonicalKind,
    pub coefficients: Vec<(usize, f64)>,
    pub rhs: f64,
    pub origin: RowOrigin,
}

impl CanonicalRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().map(|&(n, a)| a * x[n]).sum()
    }

    /// Surplus `activity - rhs`; nonnegative on feasible points of `>=` rows.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.activity(x) - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalVariable {
    pub id: String,
    /// Objective coefficient in minimize sense.
    pub cost: f64,
    pub integer: bool,
    pub lower: f64,
    pub upper: f64,
}

/// Minimize model whose rows are all `>=` or `=`, with every finite variable
/// bound materialized as its own `>=` row. Structural variables are free as
/// far as the LP is concerned; their bounds live only in rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalModel {
    pub name: String,
    /// Sense of the model this one was derived from.
    pub original_sense: Sense,
    variables: Vec<CanonicalVariable>,
    rows: Vec<CanonicalRow>,
}

/// Index over the union of canonical rows and structural variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RIndex {
    Row(usize),
    Var(usize),
}

/// Sparse vector over [`RIndex`]; missing entries read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RVector(BTreeMap<RIndex, f64>);

pub type DeltaVector = RVector;
pub type LVector = RVector;

impl RVector {
    pub fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub fn get(&self, r: RIndex) -> f64 {
        self.0.get(&r).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, r: RIndex) -> bool {
        self.0.contains_key(&r)
    }

    pub fn insert(&mut self, r: RIndex, value: f64) {
        self.0.insert(r, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (RIndex, f64)> + '_ {
        self.0.iter().map(|(&r, &v)| (r, v))
    }

    pub fn keys(&self) -> impl Iterator<Item = RIndex> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|(&r, &v)| (r, v * factor)).collect())
    }

    /// Entrywise `self + factor * other` over the union of keys.
    pub fn add_scaled(&mut self, other: &RVector, factor: f64) {
        for (r, v) in other.iter() {
            *self.0.entry(r).or_insert(0.0) += factor * v;
        }
    }

    /// Entrywise maximum over the union of keys.
    pub fn max_with(&mut self, other: &RVector) {
        for (r, v) in other.iter() {
            self.0
                .entry(r)
                .and_modify(|cur| *cur = cur.max(v))
                .or_insert(v);
        }
    }

    pub fn max_abs_diff(&self, other: &RVector) -> f64 {
        self.keys()
            .chain(other.keys())
            .map(|r| (self.get(r) - other.get(r)).abs())
            .fold(0.0, f64::max)
    }
}

impl FromIterator<(RIndex, f64)> for RVector {
    fn from_iter<I: IntoIterator<Item = (RIndex, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Turns `model` into minimize form with `>=`/`=` rows and explicit bound rows.
///
/// Constraint rows keep their order; bound rows follow, lower before upper for
/// each variable. Duplicate coefficient entries are merged and zeros dropped.
pub fn canonicalize(model: &Model) -> Result<CanonicalModel> {
    let flip = match model.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut variables = Vec::with_capacity(model.variables.len());
    for v in &model.variables {
        if v.lower > v.upper || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
            return Err(Error::InfeasibleBounds {
                variable: v.id.clone(),
                lower: v.lower,
                upper: v.upper,
            });
        }
        variables.push(CanonicalVariable {
            id: v.id.clone(),
            cost: flip * v.objective,
            integer: v.integer,
            lower: v.lower,
            upper: v.upper,
        });
    }

    let mut rows = Vec::with_capacity(model.rows.len() + 2 * model.variables.len());
    for (index, row) in model.rows.iter().enumerate() {
        let coefficients = merge_coefficients(&row.coefficients);
        let (kind, sign, negated) = match row.kind {
            RowKind::Ge => (CanonicalKind::Ge, 1.0, false),
            RowKind::Le => (CanonicalKind::Ge, -1.0, true),
            RowKind::Eq => (CanonicalKind::Eq, 1.0, false),
        };
        rows.push(CanonicalRow {
            id: row.id.clone(),
            kind,
            coefficients: coefficients.into_iter().map(|(n, a)| (n, sign * a)).collect(),
            rhs: sign * row.rhs,
            origin: RowOrigin::Constraint {
                row: index,
                negated,
            },
        });
    }
    for (n, v) in model.variables.iter().enumerate() {
        if v.lower.is_finite() {
            rows.push(CanonicalRow {
                id: format!("{}.lo", v.id),
                kind: CanonicalKind::Ge,
                coefficients: alloc::vec![(n, 1.0)],
                rhs: v.lower,
                origin: RowOrigin::LowerBound(n),
            });
        }
        if v.upper.is_finite() {
            rows.push(CanonicalRow {
                id: format!("{}.up", v.id),
                kind: CanonicalKind::Ge,
                coefficients: alloc::vec![(n, -1.0)],
                rhs: -v.upper,
                origin: RowOrigin::UpperBound(n),
            });
        }
    }

    Ok(CanonicalModel {
        name: model.name.clone(),
        original_sense: model.sense,
        variables,
        rows,
    })
}

pub(crate) fn merge_coefficients(coefficients: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(n, a) in coefficients {
        *merged.entry(n).or_insert(0.0) += a;
    }
    merged.into_iter().filter(|&(_, a)| a != 0.0).collect()
}

impl CanonicalModel {
    /// Builds a canonical model directly. Rows must already be `>=`/`=`.
    pub fn from_parts(
        name: impl Into<String>,
        original_sense: Sense,
        variables: Vec<CanonicalVariable>,
        rows: Vec<CanonicalRow>,
    ) -> Self {
        Self {
            name: name.into(),
            original_sense,
            variables,
            rows,
        }
    }

    pub fn variables(&self) -> &[CanonicalVariable] {
        &self.variables
    }

    pub fn rows(&self) -> &[CanonicalRow] {
        &self.rows
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Copy of `self` with `row` appended.
    pub fn with_row(&self, mut row: CanonicalRow) -> Self {
        row.coefficients = merge_coefficients(&row.coefficients);
        let mut out = self.clone();
        out.rows.push(row);
        out
    }

    pub fn with_rows(&self, rows: impl IntoIterator<Item = CanonicalRow>) -> Self {
        let mut out = self.clone();
        for mut row in rows {
            row.coefficients = merge_coefficients(&row.coefficients);
            out.rows.push(row);
        }
        out
    }

    /// Maps a minimize-sense objective value back to the original sense.
    pub fn to_original(&self, value: f64) -> f64 {
        match self.original_sense {
            Sense::Minimize => value,
            Sense::Maximize => -value,
        }
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(x)
            .map(|(v, &value)| v.cost * value)
            .sum()
    }

    /// `sum_m b_m y_m`, the dual objective of a dual point.
    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        self.rows.iter().zip(y).map(|(row, &ym)| row.rhs * ym).sum()
    }

    /// `r_n(y) = c_n - sum_m a_mn y_m` over all rows.
    pub fn reduced_costs(&self, y: &[f64]) -> Vec<f64> {
        let mut reduced: Vec<f64> = self.variables.iter().map(|v| v.cost).collect();
        for (row, &ym) in self.rows.iter().zip(y) {
            if ym != 0.0 {
                for &(n, a) in &row.coefficients {
                    reduced[n] -= a * ym;
                }
            }
        }
        reduced
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|row| {
            let slack = row.slack(x);
            match row.kind {
                CanonicalKind::Ge => slack >= -tol,
                CanonicalKind::Eq => slack.abs() <= tol,
            }
        })
    }

    /// Every row and every structural variable, rows first.
    pub fn r_indices(&self) -> impl Iterator<Item = RIndex> + '_ {
        (0..self.rows.len())
            .map(RIndex::Row)
            .chain((0..self.variables.len()).map(RIndex::Var))
    }

    /// The indices that carry stock: `>=` rows and structural variables.
    pub fn stock_indices(&self) -> impl Iterator<Item = RIndex> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.kind == CanonicalKind::Ge)
            .map(|(m, _)| RIndex::Row(m))
            .chain((0..self.variables.len()).map(RIndex::Var))
    }

    pub fn bound_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter_map(|(m, row)| {
            matches!(row.origin, RowOrigin::LowerBound(_) | RowOrigin::UpperBound(_)).then_some(m)
        })
    }

    /// Columns of the constraint matrix as `(row, coefficient)` lists.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut columns = alloc::vec![Vec::new(); self.variables.len()];
        for (m, row) in self.rows.iter().enumerate() {
            for &(n, a) in &row.coefficients {
                columns[n].push((m, a));
            }
        }
        columns
    }
}

/// The stock vector `l`: dual values of `>=` rows and reduced costs of all
/// structural variables. Equality rows are left out.
pub fn l_vector(solution: &LpSolution, canonical: &CanonicalModel) -> Result<LVector> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::NotOptimal(solution.status));
    }
    let rows = canonical
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| row.kind == CanonicalKind::Ge)
        .map(|(m, _)| (RIndex::Row(m), solution.y[m]));
    let vars = solution
        .reduced
        .iter()
        .enumerate()
        .map(|(n, &r)| (RIndex::Var(n), r));
    Ok(rows.chain(vars).collect())
}
