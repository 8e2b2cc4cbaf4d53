//! Dense two-phase primal simplex with a dual simplex path for warm starts.
//!
//! Structural variables are free in a [`CanonicalModel`]. Internally the first
//! positive singleton `>=` row of a variable (normally its lower-bound row) is
//! handled as a shift `x = lower + x'` with `x' >= 0`; its dual is read back
//! from the reduced cost of `x'`. Variables without such a row are split into a
//! positive and a negative part. Every other row is an explicit tableau row.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{CanonicalKind, CanonicalModel};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Identity of a tableau column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColumnId {
    /// Structural variable (shifted by its lower bound, or its positive part).
    Structural(usize),
    /// Negative part of a free structural variable.
    Negative(usize),
    /// Surplus of a `>=` row.
    Surplus(usize),
    Artificial(usize),
}

/// Basic columns, one per explicit tableau row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basis {
    pub columns: Vec<ColumnId>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values per structural variable. Empty unless optimal, and empty
    /// for points derived from a dual-space solve.
    pub x: Vec<f64>,
    /// Dual value per canonical row.
    pub y: Vec<f64>,
    /// `r_n(y)` per structural variable.
    pub reduced: Vec<f64>,
    /// Minimize-sense objective; `+inf` when infeasible, `-inf` when unbounded.
    pub objective: f64,
    pub basis: Option<Basis>,
    pub iterations: usize,
}

impl LpSolution {
    fn terminal(status: LpStatus, iterations: usize) -> Self {
        let objective = match status {
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            LpStatus::Optimal => 0.0,
        };
        Self {
            status,
            x: Vec::new(),
            y: Vec::new(),
            reduced: Vec::new(),
            objective,
            basis: None,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// A dual point of `model` packaged as a solution: objective `b.y`,
    /// reduced costs from `y`, no primal values and no basis.
    pub fn from_dual(model: &CanonicalModel, y: Vec<f64>) -> Self {
        let reduced = model.reduced_costs(&y);
        let objective = model.dual_objective(&y);
        Self {
            status: LpStatus::Optimal,
            x: Vec::new(),
            y,
            reduced,
            objective,
            basis: None,
            iterations: 0,
        }
    }
}

/// `omega(child) - omega(parent)`.
pub fn objective_gain(parent: &LpSolution, child: &LpSolution) -> f64 {
    child.objective - parent.objective
}

/// Solves `model`, optionally warm-starting from `start`.
///
/// Rows of `model` that the start basis does not know about are patched with
/// their surplus columns. A warm basis that is primal feasible continues with
/// the primal simplex, one that is only dual feasible (the usual case after
/// appending a branch row) goes through the dual simplex. Anything else falls
/// back to a cold two-phase solve.
pub fn solve_lp(model: &CanonicalModel, start: Option<&Basis>) -> Result<LpSolution> {
    let layout = Layout::new(model);
    if let Some(basis) = start {
        let mut tableau = Tableau::new(model, &layout);
        if let Some(solution) = tableau.warm(model, &layout, basis)? {
            return Ok(solution);
        }
    }
    let mut tableau = Tableau::new(model, &layout);
    tableau.cold(model, &layout)
}

struct Layout {
    shift: Vec<f64>,
    /// Row handled implicitly as the lower bound of a variable, with its coefficient.
    implicit: Vec<Option<(usize, f64)>>,
    explicit_rows: Vec<usize>,
    columns: Vec<ColumnId>,
    column_index: BTreeMap<ColumnId, usize>,
}

impl Layout {
    fn new(model: &CanonicalModel) -> Self {
        let nvars = model.num_variables();
        let mut implicit: Vec<Option<(usize, f64)>> = vec![None; nvars];
        let mut is_implicit = vec![false; model.num_rows()];
        for (m, row) in model.rows().iter().enumerate() {
            if row.kind != CanonicalKind::Ge || row.coefficients.len() != 1 {
                continue;
            }
            let (n, a) = row.coefficients[0];
            if a > 1e-12 && implicit[n].is_none() && (row.rhs / a).is_finite() {
                implicit[n] = Some((m, a));
                is_implicit[m] = true;
            }
        }
        let shift = (0..nvars)
            .map(|n| match implicit[n] {
                Some((m, a)) => model.rows()[m].rhs / a,
                None => 0.0,
            })
            .collect();
        let explicit_rows: Vec<usize> = (0..model.num_rows()).filter(|&m| !is_implicit[m]).collect();

        let mut columns = Vec::new();
        for (n, imp) in implicit.iter().enumerate() {
            columns.push(ColumnId::Structural(n));
            if imp.is_none() {
                columns.push(ColumnId::Negative(n));
            }
        }
        for &m in &explicit_rows {
            if model.rows()[m].kind == CanonicalKind::Ge {
                columns.push(ColumnId::Surplus(m));
            }
        }
        for &m in &explicit_rows {
            columns.push(ColumnId::Artificial(m));
        }
        let column_index = columns.iter().enumerate().map(|(j, &c)| (c, j)).collect();
        Self {
            shift,
            implicit,
            explicit_rows,
            columns,
            column_index,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    sign: Vec<f64>,
    artificial: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn new(model: &CanonicalModel, layout: &Layout) -> Self {
        let rows = layout.explicit_rows.len();
        let cols = layout.columns.len();
        let width = cols + 1;
        let mut data = vec![0.0; rows * width];
        let mut sign = vec![1.0; rows];
        let mut basis = vec![0; rows];
        for (i, &m) in layout.explicit_rows.iter().enumerate() {
            let row = &model.rows()[m];
            let line = &mut data[i * width..(i + 1) * width];
            let mut rhs = row.rhs;
            for &(n, a) in &row.coefficients {
                line[layout.column_index[&ColumnId::Structural(n)]] += a;
                if let Some(&j) = layout.column_index.get(&ColumnId::Negative(n)) {
                    line[j] -= a;
                }
                rhs -= a * layout.shift[n];
            }
            if row.kind == CanonicalKind::Ge {
                line[layout.column_index[&ColumnId::Surplus(m)]] = -1.0;
            }
            line[cols] = rhs;
            if rhs < 0.0 {
                sign[i] = -1.0;
                for v in line.iter_mut() {
                    *v = -*v;
                }
            }
            let art = layout.column_index[&ColumnId::Artificial(m)];
            line[art] = 1.0;
            basis[i] = art;
        }
        let artificial = layout
            .columns
            .iter()
            .map(|c| matches!(c, ColumnId::Artificial(_)))
            .collect();
        Self {
            rows,
            cols,
            width,
            data,
            obj: vec![0.0; width],
            basis,
            sign,
            artificial,
            iterations: 0,
            max_iterations: 50 * (rows + cols) + 1000,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.cols]
    }

    fn objective_value(&self) -> f64 {
        -self.obj[self.cols]
    }

    fn cost(&self, model: &CanonicalModel, layout: &Layout, phase: Phase, j: usize) -> f64 {
        match (phase, layout.columns[j]) {
            (Phase::One, ColumnId::Artificial(_)) => 1.0,
            (Phase::One, _) => 0.0,
            (Phase::Two, ColumnId::Structural(n)) => model.variables()[n].cost,
            (Phase::Two, ColumnId::Negative(n)) => -model.variables()[n].cost,
            (Phase::Two, _) => 0.0,
        }
    }

    fn price(&mut self, model: &CanonicalModel, layout: &Layout, phase: Phase) {
        let mut obj: Vec<f64> = (0..self.cols)
            .map(|j| self.cost(model, layout, phase, j))
            .collect();
        obj.push(0.0);
        if phase == Phase::Two {
            // constant from the shifted variables
            let constant: f64 = model
                .variables()
                .iter()
                .zip(&layout.shift)
                .map(|(v, s)| v.cost * s)
                .sum();
            obj[self.cols] = -constant;
        }
        for i in 0..self.rows {
            let cb = self.cost(model, layout, phase, self.basis[i]);
            if cb != 0.0 {
                let line = &self.data[i * self.width..(i + 1) * self.width];
                for (o, &t) in obj.iter_mut().zip(line) {
                    *o -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, j: usize) -> Result<()> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::SolverFailure {
                iterations: self.iterations,
            });
        }
        let w = self.width;
        let p = self.at(r, j);
        let inv = 1.0 / p;
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.data[r * w + j] = 1.0;
        let nonzero: Vec<usize> = (0..w).filter(|&k| self.data[r * w + k] != 0.0).collect();
        let pivot_row: Vec<f64> = nonzero.iter().map(|&k| self.data[r * w + k]).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + j];
            if f == 0.0 {
                continue;
            }
            let line = &mut self.data[i * w..(i + 1) * w];
            for (&k, &v) in nonzero.iter().zip(&pivot_row) {
                line[k] -= f * v;
            }
            line[j] = 0.0;
        }
        let f = self.obj[j];
        if f != 0.0 {
            for (&k, &v) in nonzero.iter().zip(&pivot_row) {
                self.obj[k] -= f * v;
            }
            self.obj[j] = 0.0;
        }
        self.basis[r] = j;
        Ok(())
    }

    fn eligible(&self, is_basic: &[bool], j: usize) -> bool {
        !self.artificial[j] && !is_basic[j]
    }

    fn basic_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.cols];
        for &b in &self.basis {
            flags[b] = true;
        }
        flags
    }

    fn primal(&mut self, phase: Phase) -> Result<Outcome> {
        let stall_limit = 3 * (self.rows + self.cols);
        let mut stall = 0;
        let mut bland = false;
        let mut last = self.objective_value();
        loop {
            let is_basic = self.basic_flags();
            let mut entering = None;
            let mut best = -tol::FEASIBILITY;
            for j in 0..self.cols {
                if !self.eligible(&is_basic, j) {
                    continue;
                }
                let d = self.obj[j];
                if bland {
                    if d < -tol::FEASIBILITY {
                        entering = Some(j);
                        break;
                    }
                } else if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
            let Some(j) = entering else {
                return Ok(Outcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, j);
                let ratio = if phase == Phase::Two && self.artificial[self.basis[i]] {
                    if a.abs() > 1e-9 {
                        0.0
                    } else {
                        continue;
                    }
                } else if a > 1e-9 {
                    self.rhs(i).max(0.0) / a
                } else {
                    continue;
                };
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                a.abs() > self.at(r, j).abs()
                            }
                        } else {
                            ratio < best_ratio
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(r, j)?;

            let now = self.objective_value();
            if now < last - 1e-12 * (1.0 + last.abs()) {
                stall = 0;
            } else {
                stall += 1;
                if stall > stall_limit {
                    bland = true;
                }
            }
            last = now;
        }
    }

    /// Dual simplex on a dual feasible basis. Returns `false` if the LP is
    /// primal infeasible.
    fn dual(&mut self) -> Result<bool> {
        let stall_limit = 3 * (self.rows + self.cols);
        let mut stall = 0;
        let mut last = self.objective_value();
        loop {
            let bland = stall > stall_limit;
            let mut leaving = None;
            let mut worst = -tol::FEASIBILITY;
            for i in 0..self.rows {
                let v = self.rhs(i);
                if v < -tol::FEASIBILITY {
                    if bland {
                        if leaving.is_none_or(|r: usize| self.basis[i] < self.basis[r]) {
                            leaving = Some(i);
                        }
                    } else if v < worst {
                        worst = v;
                        leaving = Some(i);
                    }
                }
            }
            let Some(r) = leaving else {
                return Ok(true);
            };
            let is_basic = self.basic_flags();
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if !self.eligible(&is_basic, j) {
                    continue;
                }
                let a = self.at(r, j);
                if a < -1e-9 {
                    let ratio = self.obj[j].max(0.0) / -a;
                    if entering.is_none_or(|(_, best)| ratio < best - 1e-12 * (1.0 + best)) {
                        entering = Some((j, ratio));
                    }
                }
            }
            let Some((j, _)) = entering else {
                return Ok(false);
            };
            self.pivot(r, j)?;
            let now = self.objective_value();
            if now > last + 1e-12 * (1.0 + last.abs()) {
                stall = 0;
            } else {
                stall += 1;
            }
            last = now;
        }
    }

    fn cold(&mut self, model: &CanonicalModel, layout: &Layout) -> Result<LpSolution> {
        // rows whose surplus already has +1 after sign flip start on the surplus
        for i in 0..self.rows {
            let m = layout.explicit_rows[i];
            if self.sign[i] < 0.0 && model.rows()[m].kind == CanonicalKind::Ge {
                let s = layout.column_index[&ColumnId::Surplus(m)];
                self.pivot(i, s)?;
                self.iterations -= 1;
            }
        }
        self.price(model, layout, Phase::One);
        self.primal(Phase::One)?;
        let scale = 1.0
            + (0..self.rows)
                .map(|i| model.rows()[layout.explicit_rows[i]].rhs.abs())
                .fold(0.0, f64::max);
        if self.objective_value() > tol::FEASIBILITY * scale {
            return Ok(LpSolution::terminal(LpStatus::Infeasible, self.iterations));
        }
        self.drive_out_artificials()?;
        self.price(model, layout, Phase::Two);
        match self.primal(Phase::Two)? {
            Outcome::Optimal => Ok(self.extract(model, layout)),
            Outcome::Unbounded => Ok(LpSolution::terminal(LpStatus::Unbounded, self.iterations)),
        }
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        for i in 0..self.rows {
            if !self.artificial[self.basis[i]] {
                continue;
            }
            let is_basic = self.basic_flags();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if !self.eligible(&is_basic, j) {
                    continue;
                }
                let a = self.at(i, j).abs();
                if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.data[i * self.width + self.cols] = 0.0;
                self.pivot(i, j)?;
            }
        }
        Ok(())
    }

    fn warm(
        &mut self,
        model: &CanonicalModel,
        layout: &Layout,
        start: &Basis,
    ) -> Result<Option<LpSolution>> {
        for column in &start.columns {
            if matches!(column, ColumnId::Artificial(_)) {
                continue;
            }
            let Some(&j) = layout.column_index.get(column) else {
                return Ok(None);
            };
            if self.basis.contains(&j) {
                return Ok(None);
            }
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                if !self.artificial[self.basis[i]] {
                    continue;
                }
                let a = self.at(i, j).abs();
                if a > tol::PIVOT && best.is_none_or(|(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            let Some((i, _)) = best else {
                return Ok(None);
            };
            self.pivot(i, j)?;
        }
        for i in 0..self.rows {
            if !self.artificial[self.basis[i]] {
                continue;
            }
            let m = layout.explicit_rows[i];
            let Some(&s) = layout.column_index.get(&ColumnId::Surplus(m)) else {
                return Ok(None);
            };
            if self.at(i, s).abs() <= tol::PIVOT {
                return Ok(None);
            }
            self.pivot(i, s)?;
        }
        self.price(model, layout, Phase::Two);

        let primal_feasible = (0..self.rows).all(|i| self.rhs(i) >= -tol::FEASIBILITY);
        if !primal_feasible {
            let is_basic = self.basic_flags();
            let dual_feasible = (0..self.cols)
                .filter(|&j| self.eligible(&is_basic, j))
                .all(|j| self.obj[j] >= -tol::FEASIBILITY);
            if !dual_feasible {
                return Ok(None);
            }
            if !self.dual()? {
                return Ok(Some(LpSolution::terminal(LpStatus::Infeasible, self.iterations)));
            }
        }
        match self.primal(Phase::Two)? {
            Outcome::Optimal => Ok(Some(self.extract(model, layout))),
            Outcome::Unbounded => Ok(Some(LpSolution::terminal(
                LpStatus::Unbounded,
                self.iterations,
            ))),
        }
    }

    fn extract(&self, model: &CanonicalModel, layout: &Layout) -> LpSolution {
        let mut value = vec![0.0; self.cols];
        for i in 0..self.rows {
            value[self.basis[i]] = self.rhs(i);
        }
        let x: Vec<f64> = (0..model.num_variables())
            .map(|n| {
                let pos = value[layout.column_index[&ColumnId::Structural(n)]];
                let neg = layout
                    .column_index
                    .get(&ColumnId::Negative(n))
                    .map_or(0.0, |&j| value[j]);
                snap(layout.shift[n] + pos - neg)
            })
            .collect();

        let mut y = vec![0.0; model.num_rows()];
        for (i, &m) in layout.explicit_rows.iter().enumerate() {
            let art = layout.column_index[&ColumnId::Artificial(m)];
            y[m] = snap(-self.sign[i] * self.obj[art]);
        }
        for (n, imp) in layout.implicit.iter().enumerate() {
            if let Some((m, a)) = *imp {
                let d = self.obj[layout.column_index[&ColumnId::Structural(n)]];
                y[m] = snap(d / a);
            }
        }
        let reduced = model.reduced_costs(&y).into_iter().map(snap).collect();
        let objective = model.objective_value(&x);
        let basis = Basis {
            columns: self.basis.iter().map(|&j| layout.columns[j]).collect(),
        };
        LpSolution {
            status: LpStatus::Optimal,
            x,
            y,
            reduced,
            objective,
            basis: Some(basis),
            iterations: self.iterations,
        }
    }
}

fn snap(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonicalize, Model, Row, RowKind, Sense, Variable};
    use alloc::format;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} != {b}");
    }

    fn two_triangles() -> CanonicalModel {
        let mut m = Model::new("triangles", Sense::Minimize);
        for t in 1..=2 {
            for l in 1..=3 {
                m.add_variable(Variable::binary(format!("x{t}{l}"), 1.0)).unwrap();
            }
        }
        for t in 0..2 {
            for l in 0..3 {
                let coefs = vec![(3 * t + l, 1.0), (3 * t + (l + 1) % 3, 1.0)];
                m.add_row(Row::new(format!("y{t}{l}"), RowKind::Ge, coefs, 1.0))
                    .unwrap();
            }
        }
        canonicalize(&m).unwrap()
    }

    #[test]
    fn triangles_root() {
        let c = two_triangles();
        let s = solve_lp(&c, None).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_close(s.objective, 3.0);
        for n in 0..6 {
            assert_close(s.x[n], 0.5);
            assert_close(s.reduced[n], 0.0);
        }
        for m in 0..6 {
            assert_close(s.y[m], 0.5);
        }
        for m in 6..18 {
            assert_close(s.y[m], 0.0);
        }
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = Model::new("bad", Sense::Minimize);
        m.add_variable(Variable::continuous("x", f64::NEG_INFINITY, f64::INFINITY, 1.0))
            .unwrap();
        m.add_row(Row::new("a", RowKind::Ge, vec![(0, 1.0)], 1.0)).unwrap();
        m.add_row(Row::new("b", RowKind::Ge, vec![(0, -1.0)], 0.0)).unwrap();
        let s = solve_lp(&canonicalize(&m).unwrap(), None).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn free_direction_is_unbounded() {
        let mut m = Model::new("unb", Sense::Minimize);
        m.add_variable(Variable::continuous("x", f64::NEG_INFINITY, 3.0, 1.0))
            .unwrap();
        let s = solve_lp(&canonicalize(&m).unwrap(), None).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_free_duals() {
        // min x + 2y  s.t. x + y = 3, x - y >= -1, 0 <= x, y
        let mut m = Model::new("eq", Sense::Minimize);
        m.add_variable(Variable::continuous("x", 0.0, f64::INFINITY, 1.0)).unwrap();
        m.add_variable(Variable::continuous("y", 0.0, f64::INFINITY, 2.0)).unwrap();
        m.add_row(Row::new("e", RowKind::Eq, vec![(0, 1.0), (1, 1.0)], 3.0)).unwrap();
        m.add_row(Row::new("g", RowKind::Ge, vec![(0, 1.0), (1, -1.0)], -1.0)).unwrap();
        let c = canonicalize(&m).unwrap();
        let s = solve_lp(&c, None).unwrap();
        assert_close(s.objective, 3.0);
        assert_close(s.x[0], 3.0);
        assert_close(c.dual_objective(&s.y), 3.0);
        assert!(s.reduced.iter().all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn warm_start_after_branch_row() {
        let c = two_triangles();
        let root = solve_lp(&c, None).unwrap();
        let child = c.with_row(crate::model::CanonicalRow {
            id: "branch".into(),
            kind: CanonicalKind::Ge,
            coefficients: vec![(0, -1.0)],
            rhs: 0.0,
            origin: crate::model::RowOrigin::Branch { variable: 0 },
        });
        let warm = solve_lp(&child, root.basis.as_ref()).unwrap();
        let cold = solve_lp(&child, None).unwrap();
        assert_close(warm.objective, 3.5);
        assert_close(cold.objective, 3.5);
    }
}
