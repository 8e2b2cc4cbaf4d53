#![allow(dead_code)]

use conbranch::parse_native;
use conbranch_core::{Model, Row, RowKind, Sense, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

pub fn two_triangles() -> Model {
    parse_native(&fixture("two_triangles.txt")).unwrap()
}

pub fn five_cycle() -> Model {
    parse_native(&fixture("five_cycle.txt")).unwrap()
}

/// Random binary MILP with up to 8 variables and 8 rows and integer
/// coefficients in [-3, 3]. Right-hand sides are placed around a hidden 0/1
/// point, so every instance has an integer solution.
pub fn random_binary(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = rng.random_range(2..=8);
    let nrows = rng.random_range(1..=8);
    let sense = if rng.random_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let hidden: Vec<f64> = (0..nvars).map(|_| rng.random_range(0..=1) as f64).collect();
    let mut m = Model::new(format!("rand{seed}"), sense);
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

/// Every feasible 0/1 point, by direct row checks.
pub fn binary_points(model: &Model) -> Vec<Vec<f64>> {
    let n = model.variables().len();
    (0u32..1 << n)
        .map(|mask| (0..n).map(|k| ((mask >> k) & 1) as f64).collect::<Vec<f64>>())
        .filter(|x| {
            model.rows().iter().all(|row| {
                let a: f64 = row.coefficients.iter().map(|&(k, c)| c * x[k]).sum();
                match row.kind {
                    RowKind::Ge => a >= row.rhs - 1e-9,
                    RowKind::Le => a <= row.rhs + 1e-9,
                    RowKind::Eq => (a - row.rhs).abs() <= 1e-9,
                }
            })
        })
        .collect()
}

/// Optimum in minimize sense.
pub fn binary_optimum_min(model: &Model) -> Option<f64> {
    let sign = match model.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    binary_points(model)
        .iter()
        .map(|x| sign * model.objective_value(x))
        .min_by(f64::total_cmp)
}
