#![allow(dead_code)]

use conbranch_core::{canonicalize, CanonicalModel, Model, Row, RowKind, Sense, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two disjoint triangles of covering rows, minimize the number of vertices.
pub fn two_triangles() -> Model {
    let mut m = Model::new("triangles", Sense::Minimize);
    for t in 1..=2 {
        for l in 1..=3 {
            m.add_variable(Variable::binary(format!("x{t}{l}"), 1.0)).unwrap();
        }
    }
    for t in 0..2 {
        for l in 0..3 {
            let coefs = vec![(3 * t + l, 1.0), (3 * t + (l + 1) % 3, 1.0)];
            m.add_row(Row::new(format!("y{}{}", t + 1, l + 1), RowKind::Ge, coefs, 1.0))
                .unwrap();
        }
    }
    m
}

/// Maximize the sum of five binaries, any three cyclically consecutive sum to at most one.
pub fn five_cycle() -> Model {
    let mut m = Model::new("cycle", Sense::Maximize);
    for i in 1..=5 {
        m.add_variable(Variable::binary(format!("x{i}"), 1.0)).unwrap();
    }
    for i in 0..5 {
        let coefs = vec![(i, 1.0), ((i + 1) % 5, 1.0), ((i + 2) % 5, 1.0)];
        m.add_row(Row::new(format!("r{}", i + 1), RowKind::Le, coefs, 1.0))
            .unwrap();
    }
    m
}

pub fn canonical(model: &Model) -> CanonicalModel {
    canonicalize(model).unwrap()
}

/// Random binary MILP: up to 8 variables and 8 rows, integer coefficients in
/// [-3, 3]. Right-hand sides are set around a hidden 0/1 point, so the
/// instance always has an integer solution.
pub fn random_binary(rng: &mut ChaCha8Rng, index: usize) -> Model {
    let nvars = rng.random_range(2..=8);
    let nrows = rng.random_range(1..=8);
    let sense = if rng.random_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let hidden: Vec<f64> = (0..nvars).map(|_| rng.random_range(0..=1) as f64).collect();
    let mut m = Model::new(format!("rand{index}"), sense);
    for n in 0..nvars {
        let c = rng.random_range(-3..=3) as f64;
        m.add_variable(Variable::binary(format!("x{n}"), c)).unwrap();
    }
    for r in 0..nrows {
        let mut coefs = Vec::new();
        for n in 0..nvars {
            if rng.random_bool(0.6) {
                let a = rng.random_range(-3..=3);
                if a != 0 {
                    coefs.push((n, a as f64));
                }
            }
        }
        if coefs.is_empty() {
            coefs.push((rng.random_range(0..nvars), 1.0));
        }
        let activity: f64 = coefs.iter().map(|&(n, a)| a * hidden[n]).sum();
        let slack = rng.random_range(0..=2) as f64;
        let (kind, rhs) = match rng.random_range(0..10) {
            0 => (RowKind::Eq, activity),
            1..=5 => (RowKind::Ge, activity - slack),
            _ => (RowKind::Le, activity + slack),
        };
        m.add_row(Row::new(format!("c{r}"), kind, coefs, rhs)).unwrap();
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feasible 0/1 points of a pure binary model, found by direct row checks.
pub fn binary_points(model: &Model) -> Vec<Vec<f64>> {
    let n = model.variables().len();
    let mut points = Vec::new();
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|k| ((mask >> k) & 1) as f64).collect();
        let ok = model.rows().iter().all(|row| {
            let a: f64 = row.coefficients.iter().map(|&(k, c)| c * x[k]).sum();
            match row.kind {
                RowKind::Ge => a >= row.rhs - 1e-9,
                RowKind::Le => a <= row.rhs + 1e-9,
                RowKind::Eq => (a - row.rhs).abs() <= 1e-9,
            }
        });
        if ok {
            points.push(x);
        }
    }
    points
}

/// Optimum of a pure binary model in minimize sense, `None` if infeasible.
pub fn binary_optimum_min(model: &Model) -> Option<f64> {
    let sign = match model.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    binary_points(model)
        .iter()
        .map(|x| {
            sign * model
                .variables()
                .iter()
                .zip(x)
                .map(|(v, &value)| v.objective * value)
                .sum::<f64>()
        })
        .min_by(f64::total_cmp)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
