mod common;

use conbranch_core::branching::{
    case_delta, differentiate, fractional_candidates, BranchOptions, Differentiation, File,
};
use conbranch_core::combining::{
    build_huge_lp, combine, combine_complex, merge_columns, sequential_combine, solve_huge,
    HugeOptions,
};
use conbranch_core::cutgen::{cuts_for_files, verify_cut};
use conbranch_core::heuristics::{
    fractional_count, integrity_search, refined_case_solve, DistanceWeights, IntegrityOptions,
    DEFAULT_DISTANCE_FLOOR,
};
use conbranch_core::oracle::brute_force_optimum;
use conbranch_core::*;
use proptest::prelude::*;

struct Instance {
    model: Model,
    canonical: CanonicalModel,
    root: LpSolution,
    l: RVector,
    files: Vec<File>,
    candidates: Vec<usize>,
}

fn instance(seed: u64, normalize: bool) -> Option<Instance> {
    let model = common::random_binary(&mut common::rng(seed), seed as usize);
    let canonical = canonicalize(&model).unwrap();
    let root = solve_lp(&canonical, None).unwrap();
    if !root.is_optimal() {
        return None;
    }
    let l = l_vector(&root, &canonical).unwrap();
    let options = BranchOptions {
        normalize,
        ..BranchOptions::default()
    };
    let candidates = fractional_candidates(&root, &canonical);
    let mut files = Vec::new();
    for (id, &n) in candidates.iter().enumerate() {
        if let Differentiation::File(f) = differentiate(&canonical, &root, id, n, &options).unwrap() {
            files.push(f);
        }
    }
    Some(Instance {
        model,
        canonical,
        root,
        l,
        files,
        candidates,
    })
}

fn dual_feasible(model: &CanonicalModel, y: &[f64]) -> bool {
    let signs = model
        .rows()
        .iter()
        .zip(y)
        .all(|(r, &v)| r.kind == CanonicalKind::Eq || v >= -1e-7);
    signs && model.reduced_costs(y).iter().all(|r| r.abs() <= 1e-7)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn canonical_objective_round_trips(seed in any::<u64>()) {
        let model = common::random_binary(&mut common::rng(seed), 0);
        let canonical = canonicalize(&model).unwrap();
        let root = solve_lp(&canonical, None).unwrap();
        if !root.is_optimal() {
            return Ok(());
        }
        let original = model.objective_value(&root.x);
        prop_assert!((canonical.to_original(root.objective) - original).abs() <= 1e-9);
        let indices: Vec<RIndex> = canonical.r_indices().collect();
        let unique: std::collections::BTreeSet<_> = indices.iter().copied().collect();
        prop_assert_eq!(indices.len(), canonical.num_rows() + canonical.num_variables());
        prop_assert_eq!(unique.len(), indices.len());
    }

    #[test]
    fn optimum_is_dual_feasible_and_complementary(seed in any::<u64>()) {
        let model = common::canonical(&common::random_binary(&mut common::rng(seed), 0));
        let root = solve_lp(&model, None).unwrap();
        if !root.is_optimal() {
            return Ok(());
        }
        prop_assert!(model.is_feasible(&root.x, 1e-7));
        prop_assert!(dual_feasible(&model, &root.y));
        prop_assert!((model.dual_objective(&root.y) - root.objective).abs() <= 1e-7);
        for (row, &y) in model.rows().iter().zip(&root.y) {
            if row.kind == CanonicalKind::Ge {
                prop_assert!((y * row.slack(&root.x)).abs() <= 1e-6);
            }
        }
        let l = l_vector(&root, &model).unwrap();
        prop_assert!(l.iter().all(|(_, v)| v >= -1e-7));
    }

    #[test]
    fn adding_a_row_never_lowers_the_optimum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let model = common::canonical(&common::random_binary(&mut rng, 0));
        let root = solve_lp(&model, None).unwrap();
        if !root.is_optimal() {
            return Ok(());
        }
        let extra = common::canonical(&common::random_binary(&mut rng, 1));
        let n = model.num_variables();
        let row = extra.rows()[0].clone();
        let row = CanonicalRow {
            coefficients: row.coefficients.into_iter().filter(|&(k, _)| k < n).collect(),
            ..row
        };
        let tighter = solve_lp(&model.with_row(row), None).unwrap();
        prop_assert!(tighter.objective >= root.objective - 1e-7);
    }

    #[test]
    fn warm_and_cold_children_agree(seed in any::<u64>()) {
        let Some(inst) = instance(seed, true) else { return Ok(()) };
        for &n in &inst.candidates {
            let floor = inst.root.x[n].floor();
            for direction in [BranchDirection::Down, BranchDirection::Up] {
                let row = conbranch_core::branching::branch_row(&inst.canonical, n, direction, floor);
                let child = inst.canonical.with_row(row);
                let warm = solve_lp(&child, inst.root.basis.as_ref()).unwrap();
                let cold = solve_lp(&child, None).unwrap();
                prop_assert_eq!(warm.status, cold.status);
                if warm.is_optimal() {
                    prop_assert!((warm.objective - cold.objective).abs() <= 1e-7);
                    prop_assert!(dual_feasible(&child, &warm.y));
                }
            }
        }
    }

    #[test]
    fn case_deltas_respect_the_stock(seed in any::<u64>()) {
        let Some(inst) = instance(seed, false) else { return Ok(()) };
        for file in &inst.files {
            for case in &file.cases {
                for (r, lr) in inst.l.iter() {
                    prop_assert!(case.delta.get(r) <= lr + 1e-7, "{:?}: {} > {}", r, case.delta.get(r), lr);
                }
                if case.gain > 1e-6 {
                    let sharp = inst.l.iter().any(|(r, lr)| lr > 1e-6 && (case.delta.get(r) - lr).abs() <= 1e-6);
                    prop_assert!(sharp);
                }
            }
        }
    }

    #[test]
    fn deltas_are_linear_in_the_displacement(seed in any::<u64>(), lambda in 0.0f64..3.0) {
        let Some(inst) = instance(seed, false) else { return Ok(()) };
        for file in &inst.files {
            for case in &file.cases {
                let y: Vec<f64> = (0..case.child.y.len())
                    .map(|m| {
                        let base = inst.root.y.get(m).copied().unwrap_or(0.0);
                        base + lambda * (case.child.y[m] - base)
                    })
                    .collect();
                let scaled = LpSolution::from_dual(&case.child_model(&inst.canonical), y);
                let delta = case_delta(&inst.root, &scaled, &inst.canonical).unwrap();
                prop_assert!(delta.max_abs_diff(&case.delta.scaled(lambda)) <= 1e-9);
            }
        }
    }

    #[test]
    fn files_aggregate_by_max_and_min(seed in any::<u64>(), normalize in any::<bool>()) {
        let Some(inst) = instance(seed, normalize) else { return Ok(()) };
        for file in &inst.files {
            for r in inst.canonical.r_indices() {
                let max = file.cases.iter().map(|c| c.delta.get(r)).fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(file.delta.get(r), max);
            }
            let min = file.cases.iter().map(|c| c.gain).fold(f64::INFINITY, f64::min);
            if file.improving {
                prop_assert!((file.gain - min).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn normalization_only_shrinks_consumption(seed in any::<u64>()) {
        let Some(raw) = instance(seed, false) else { return Ok(()) };
        let norm = instance(seed, true).unwrap();
        for (a, b) in raw.files.iter().zip(&norm.files) {
            for (ca, cb) in a.cases.iter().zip(&b.cases) {
                for (r, d) in ca.delta.iter() {
                    if d > 0.0 {
                        prop_assert!(cb.delta.get(r) <= d + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn every_bound_is_valid(seed in any::<u64>(), normalize in any::<bool>()) {
        let Some(inst) = instance(seed, normalize) else { return Ok(()) };
        let Some(optimum) = common::binary_optimum_min(&inst.model) else { return Ok(()) };
        let omega0 = inst.root.objective;
        prop_assert!(omega0 <= optimum + 1e-6);
        let improving: Vec<File> = inst.files.iter().filter(|f| f.improving).cloned().collect();

        let simple = combine(&improving, &inst.l, omega0).unwrap();
        prop_assert!(simple.bound <= optimum + 1e-6);
        prop_assert!(simple.bound >= omega0 - 1e-9);

        let columns: Vec<Vec<File>> = improving.iter().map(|f| vec![f.clone(), f.clone()]).collect();
        let complex = combine_complex(&columns, &[], &inst.l, omega0).unwrap();
        prop_assert!((complex.bound - simple.bound).abs() <= 1e-9);
        let merged = merge_columns(&columns, &complex).unwrap();
        let remerged = combine(&merged, &inst.l, omega0).unwrap();
        prop_assert!(remerged.bound <= optimum + 1e-6);

        let options = BranchOptions { normalize, ..BranchOptions::default() };
        let sequential = sequential_combine(&inst.canonical, &inst.root, &inst.candidates, &inst.l, &options).unwrap();
        prop_assert!(sequential.result.bound <= optimum + 1e-6);
        for (r, lr) in inst.l.iter() {
            let used: f64 = sequential.files.iter().map(|f| f.delta.get(r)).sum();
            prop_assert!(used <= lr.max(0.0) + 1e-7);
        }

        let diffs: Vec<(usize, f64)> = improving.iter().map(|f| (f.variable, inst.root.x[f.variable].floor())).collect();
        let huge = solve_huge(&build_huge_lp(&inst.canonical, &diffs, &HugeOptions::default()).unwrap()).unwrap();
        prop_assert!(huge.bound <= optimum + 1e-6);
        prop_assert!(huge.bound >= simple.bound - 1e-6);
    }

    #[test]
    fn cuts_hold_for_every_integer_point(seed in any::<u64>(), normalize in any::<bool>()) {
        let Some(inst) = instance(seed, normalize) else { return Ok(()) };
        let points = common::binary_points(&inst.model);
        for cut in cuts_for_files(&inst.files, &inst.canonical) {
            prop_assert!(verify_cut(&cut, &points, 1e-7).is_empty());
            prop_assert!(cut.slack(&inst.root.x) < 0.0);
            let gain = inst.files.iter().find(|f| f.id == cut.file).unwrap().gain;
            let tightened = solve_lp(&inst.canonical.with_row(cut.canonical.clone()), None).unwrap();
            if tightened.is_optimal() {
                prop_assert!(tightened.objective >= inst.root.objective + gain - 1e-6);
            }
        }
    }

    #[test]
    fn root_cuts_survive_tightening(seed in any::<u64>()) {
        let Some(inst) = instance(seed, true) else { return Ok(()) };
        let points = common::binary_points(&inst.model);
        if points.is_empty() {
            return Ok(());
        }
        // A row every integer point satisfies: activity at least its minimum.
        let n = inst.canonical.num_variables();
        let coefficients: Vec<(usize, f64)> = (0..n).map(|k| (k, ((seed >> k) % 5) as f64 - 2.0)).collect();
        let rhs = points
            .iter()
            .map(|x| coefficients.iter().map(|&(k, a)| a * x[k]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let mut tighter = inst.model.clone();
        tighter.add_row(Row::new("extra", RowKind::Ge, coefficients, rhs)).unwrap();
        let remaining = common::binary_points(&tighter);
        for cut in cuts_for_files(&inst.files, &inst.canonical) {
            prop_assert!(verify_cut(&cut, &remaining, 1e-7).is_empty());
        }
    }

    #[test]
    fn refinement_never_loses_efficiency(seed in any::<u64>()) {
        let Some(inst) = instance(seed, false) else { return Ok(()) };
        let weights = DistanceWeights::new(&inst.l, DEFAULT_DISTANCE_FLOOR);
        for file in &inst.files {
            for case in &file.cases {
                prop_assert!(weights.distance(&case.delta) >= 0.0);
                let once = refined_case_solve(&inst.root, &inst.canonical, case, &weights).unwrap();
                let twice = refined_case_solve(&inst.root, &inst.canonical, &once, &weights).unwrap();
                let child = case.child_model(&inst.canonical);
                for refined in [&once, &twice] {
                    prop_assert!(dual_feasible(&child, &refined.child.y));
                    prop_assert!(refined.gain >= -1e-7);
                }
                prop_assert!(weights.efficiency(&once) >= weights.efficiency(case) - 1e-6);
                prop_assert!(weights.efficiency(&twice) >= weights.efficiency(&once) - 1e-6);
            }
        }
    }

    #[test]
    fn integrity_search_never_adds_fractional_values(seed in any::<u64>(), iters in 0usize..4) {
        let Some(inst) = instance(seed, false) else { return Ok(()) };
        let result = integrity_search(&inst.canonical, &inst.root, iters, &IntegrityOptions::default()).unwrap();
        prop_assert!(result.fractional <= fractional_count(&inst.root.x, &inst.canonical));
        prop_assert!(inst.canonical.is_feasible(&result.x, 1e-6));
        prop_assert!((inst.canonical.objective_value(&result.x) - inst.root.objective).abs() <= 1e-6);
        if iters == 0 {
            prop_assert_eq!(&result.x, &inst.root.x);
        }
    }

    #[test]
    fn oracle_matches_direct_enumeration(seed in any::<u64>()) {
        let model = common::random_binary(&mut common::rng(seed), 0);
        let result = brute_force_optimum(&model).unwrap();
        let sign = match model.sense { Sense::Minimize => 1.0, Sense::Maximize => -1.0 };
        let expected = common::binary_optimum_min(&model);
        prop_assert_eq!(result.optimum.map(|v| sign * v), expected);
        if let Some(x) = &result.argmin {
            prop_assert!(common::binary_points(&model).contains(x));
        }
    }
}
