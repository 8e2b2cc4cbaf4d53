//! Exhaustive enumeration for small models.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{canonicalize, Model, RowKind, Sense};
use crate::simplex::{solve_lp, LpStatus};

/// Largest lattice the oracle walks.
pub const LATTICE_LIMIT: usize = 1 << 20;

const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best objective in the model's own sense; `None` if infeasible.
    pub optimum: Option<f64>,
    /// A point attaining `optimum`.
    pub argmin: Option<Vec<f64>>,
    /// Integer assignments visited.
    pub enumerated: usize,
}

struct Lattice {
    integers: Vec<usize>,
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl Lattice {
    fn new(model: &Model) -> Result<Option<Self>> {
        let mut integers = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut size = 1.0f64;
        for (n, v) in model.variables().iter().enumerate() {
            if !v.integer {
                continue;
            }
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(Error::UnboundedInteger {
                    variable: v.id.clone(),
                });
            }
            let lo = libm::ceil(v.lower - 1e-9);
            let up = libm::floor(v.upper + 1e-9);
            if lo > up {
                return Ok(None);
            }
            size *= up - lo + 1.0;
            integers.push(n);
            lower.push(lo as i64);
            upper.push(up as i64);
        }
        if size > LATTICE_LIMIT as f64 {
            return Err(Error::LatticeTooLarge {
                size,
                limit: LATTICE_LIMIT,
            });
        }
        Ok(Some(Self {
            integers,
            lower,
            upper,
        }))
    }

    /// Calls `visit` on every assignment, last variable fastest.
    fn walk(&self, mut visit: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
        let mut current = self.lower.clone();
        loop {
            visit(&current)?;
            let mut k = current.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                if current[k] < self.upper[k] {
                    current[k] += 1;
                    break;
                }
                current[k] = self.lower[k];
            }
        }
    }
}

fn row_feasible(model: &Model, x: &[f64]) -> bool {
    model.rows().iter().all(|row| {
        let activity = row.activity(x);
        let tol = ROW_TOLERANCE * (1.0 + row.rhs.abs());
        match row.kind {
            RowKind::Ge => activity >= row.rhs - tol,
            RowKind::Le => activity <= row.rhs + tol,
            RowKind::Eq => (activity - row.rhs).abs() <= tol,
        }
    })
}

/// Best completion of an integer assignment: the point itself for pure
/// integer models, the LP optimum over the continuous variables otherwise.
fn complete(model: &Model, lattice: &Lattice, values: &[i64]) -> Result<Option<(Vec<f64>, f64)>> {
    let pure = lattice.integers.len() == model.variables().len();
    if pure {
        let mut x = vec![0.0; model.variables().len()];
        for (&n, &v) in lattice.integers.iter().zip(values) {
            x[n] = v as f64;
        }
        if !row_feasible(model, &x) {
            return Ok(None);
        }
        let value = model.objective_value(&x);
        return Ok(Some((x, value)));
    }
    let mut fixed = model.clone();
    for (&n, &v) in lattice.integers.iter().zip(values) {
        fixed.set_bounds(n, v as f64, v as f64);
    }
    let canonical = canonicalize(&fixed)?;
    let solution = solve_lp(&canonical, None)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => return Err(Error::Unbounded),
    }
    let value = canonical.to_original(solution.objective);
    Ok(Some((solution.x, value)))
}

/// Exact optimum by enumerating every integer assignment within bounds.
/// Continuous variables are optimized by the LP solver per assignment; an
/// unbounded continuous part is reported as [`Error::Unbounded`].
pub fn brute_force_optimum(model: &Model) -> Result<OracleResult> {
    let mut result = OracleResult {
        optimum: None,
        argmin: None,
        enumerated: 0,
    };
    let Some(lattice) = Lattice::new(model)? else {
        return Ok(result);
    };
    let better = |a: f64, b: f64| match model.sense {
        Sense::Minimize => a < b,
        Sense::Maximize => a > b,
    };
    lattice.walk(|values| {
        result.enumerated += 1;
        if let Some((x, value)) = complete(model, &lattice, values)? {
            if result.optimum.map_or(true, |best| better(value, best)) {
                result.optimum = Some(value);
                result.argmin = Some(x);
            }
        }
        Ok(())
    })?;
    Ok(result)
}

/// Every feasible integer assignment in lexicographic order, each completed
/// as in [`brute_force_optimum`].
pub fn enumerate_integer_feasible(model: &Model) -> Result<Vec<Vec<f64>>> {
    let Some(lattice) = Lattice::new(model)? else {
        return Ok(Vec::new());
    };
    let mut points = Vec::new();
    lattice.walk(|values| {
        if let Some((x, _)) = complete(model, &lattice, values)? {
            points.push(x);
        }
        Ok(())
    })?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Row, Variable};

    #[test]
    fn contradictory_integer_bounds_are_infeasible() {
        let mut m = Model::new("m", Sense::Minimize);
        m.add_variable(Variable::integer("a", 0.2, 0.8, 1.0)).unwrap();
        let result = brute_force_optimum(&m).unwrap();
        assert_eq!(result.optimum, None);
        assert!(enumerate_integer_feasible(&m).unwrap().is_empty());
    }

    #[test]
    fn lone_binary() {
        let mut m = Model::new("m", Sense::Maximize);
        m.add_variable(Variable::binary("a", 1.0)).unwrap();
        assert_eq!(enumerate_integer_feasible(&m).unwrap(), vec![vec![0.0], vec![1.0]]);
        assert_eq!(brute_force_optimum(&m).unwrap().optimum, Some(1.0));
    }

    #[test]
    fn lattice_guard() {
        let mut m = Model::new("m", Sense::Minimize);
        for k in 0..21 {
            m.add_variable(Variable::binary(alloc::format!("x{k}"), 1.0)).unwrap();
        }
        assert!(matches!(brute_force_optimum(&m), Err(Error::LatticeTooLarge { .. })));
        let mut free = Model::new("f", Sense::Minimize);
        free.add_variable(Variable::integer("z", 0.0, f64::INFINITY, 1.0)).unwrap();
        assert!(matches!(brute_force_optimum(&free), Err(Error::UnboundedInteger { .. })));
    }

    #[test]
    fn mixed_instance_solves_the_continuous_rest() {
        // min a + c, a + c >= 1.5, a binary, c in [0, 1]
        let mut m = Model::new("m", Sense::Minimize);
        m.add_variable(Variable::binary("a", 1.0)).unwrap();
        m.add_variable(Variable::continuous("c", 0.0, 1.0, 1.0)).unwrap();
        m.add_row(Row::new("r", RowKind::Ge, vec![(0, 1.0), (1, 1.0)], 1.5)).unwrap();
        let result = brute_force_optimum(&m).unwrap();
        assert!((result.optimum.unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(result.enumerated, 2);
    }
}
