//! The whole bound-strengthening run on one model.

use std::time::{Duration, Instant};

use conbranch_core::branching::{
    build_file, differentiate, fractional_candidates, BranchOptions, Differentiation, DualChoice,
    File,
};
use conbranch_core::combining::{
    build_huge_lp, combine, combine_complex, generate_anchors, merge_columns, sequential_combine,
    solve_huge, CombineResult, HugeOptions, HUGE_LP_LIMIT,
};
use conbranch_core::cutgen::cuts_for_files;
use conbranch_core::heuristics::{
    integrity_search, refined_case_solve, DistanceWeights, IntegrityOptions,
    DEFAULT_DISTANCE_FLOOR,
};
use conbranch_core::{canonicalize, l_vector, solve_lp, CanonicalModel, LpSolution, LpStatus, Model};
use serde::{Deserialize, Serialize};

use crate::native::format_row;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One weight per file.
    Simple,
    /// Several columns per file, anchors and column merging.
    Complex,
    /// Files built one after another from the remaining stock.
    Sequential,
    /// One LP over the root dual and every case dual.
    Huge,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simple => "simple",
            Mode::Complex => "complex",
            Mode::Sequential => "sequential",
            Mode::Huge => "huge",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub mode: Mode,
    pub normalize: bool,
    pub cuts: bool,
    pub integrity: bool,
    pub refine: bool,
    pub warm_start: bool,
    pub duals: DualChoice,
    pub seed: u64,
    /// Branch on at most this many of the most fractional variables.
    pub max_candidates: Option<usize>,
    /// Alternative root duals offered to the complex form.
    pub anchors: usize,
    pub integrity_iterations: usize,
    pub huge_limit: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Simple,
            normalize: true,
            cuts: false,
            integrity: false,
            refine: false,
            warm_start: true,
            duals: DualChoice::Vertex,
            seed: 0,
            max_candidates: None,
            anchors: 0,
            integrity_iterations: 10,
            huge_limit: HUGE_LP_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// The root LP was solved and the bound strengthened.
    Optimal,
    Infeasible,
    Unbounded,
    /// Both children of some branching are infeasible.
    IntegerInfeasible,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub root_ms: f64,
    pub children_ms: f64,
    pub combining_ms: f64,
    pub total_ms: f64,
}

/// Result of one run. Objective values are in the model's own sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub instance: String,
    pub mode: Mode,
    pub status: RunStatus,
    pub pure_lp: Option<f64>,
    pub bound: Option<f64>,
    /// How far the bound moved away from the LP value; never negative.
    pub bound_inc: f64,
    /// Improving files.
    pub branches: usize,
    /// Variables branched on.
    pub candidates: usize,
    /// Branchings with one infeasible child.
    pub fixings: usize,
    pub degree: f64,
    pub timings: Timings,
    /// Cuts in native row syntax.
    pub cuts: Vec<String>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn by_fractionality(root: &LpSolution, model: &CanonicalModel, limit: Option<usize>) -> Vec<usize> {
    let mut candidates = fractional_candidates(root, model);
    let distance = |n: usize| (root.x[n] - root.x[n].floor() - 0.5).abs();
    candidates.sort_by(|&a, &b| distance(a).total_cmp(&distance(b)).then(a.cmp(&b)));
    if let Some(k) = limit {
        candidates.truncate(k);
    }
    candidates.sort_unstable();
    candidates
}

struct Branched {
    /// Improving files in the requested form.
    files: Vec<File>,
    /// Per improving file: the columns offered to the complex form.
    columns: Vec<Vec<File>>,
    fixings: usize,
    infeasible: bool,
}

fn branch_all(
    model: &CanonicalModel,
    root: &LpSolution,
    l: &conbranch_core::RVector,
    candidates: &[usize],
    options: &PipelineOptions,
) -> conbranch_core::Result<Branched> {
    let branch = BranchOptions {
        warm_start: options.warm_start,
        normalize: false,
        duals: options.duals,
    };
    let weights = DistanceWeights::new(l, DEFAULT_DISTANCE_FLOOR);
    let mut out = Branched {
        files: Vec::new(),
        columns: Vec::new(),
        fixings: 0,
        infeasible: false,
    };
    for (id, &variable) in candidates.iter().enumerate() {
        let raw = match differentiate(model, root, id, variable, &branch)? {
            Differentiation::File(file) => file,
            Differentiation::Fixing { .. } => {
                out.fixings += 1;
                continue;
            }
            Differentiation::Infeasible { .. } => {
                out.infeasible = true;
                continue;
            }
        };
        let refined = if options.refine {
            let cases = raw
                .cases
                .iter()
                .map(|case| refined_case_solve(root, model, case, &weights))
                .collect::<conbranch_core::Result<Vec<_>>>()?;
            Some(build_file(cases, options.normalize)?)
        } else {
            None
        };
        let chosen = match &refined {
            Some(file) => file.clone(),
            None => build_file(raw.cases.clone(), options.normalize)?,
        };
        if !chosen.improving {
            continue;
        }
        let mut columns = vec![chosen.clone()];
        if options.mode == Mode::Complex {
            let other = build_file(raw.cases.clone(), !options.normalize)?;
            if other.improving {
                columns.push(other);
            }
            if refined.is_some() {
                let plain = build_file(raw.cases.clone(), options.normalize)?;
                columns.push(plain);
            }
        }
        out.files.push(chosen);
        out.columns.push(columns);
    }
    Ok(out)
}

/// Runs canonicalization, the root solve, branching on the candidates, the
/// selected combining form and optionally cut generation.
pub fn run_pipeline(model: &Model, options: &PipelineOptions) -> conbranch_core::Result<PipelineReport> {
    let start = Instant::now();
    let mut report = PipelineReport {
        instance: model.name.clone(),
        mode: options.mode,
        status: RunStatus::Optimal,
        pure_lp: None,
        bound: None,
        bound_inc: 0.0,
        branches: 0,
        candidates: 0,
        fixings: 0,
        degree: 0.0,
        timings: Timings::default(),
        cuts: Vec::new(),
    };
    let canonical = canonicalize(model)?;
    let mut root = solve_lp(&canonical, None)?;
    report.timings.root_ms = ms(start.elapsed());
    match root.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => report.status = RunStatus::Infeasible,
        LpStatus::Unbounded => report.status = RunStatus::Unbounded,
    }
    if report.status != RunStatus::Optimal {
        report.timings.total_ms = ms(start.elapsed());
        return Ok(report);
    }
    let omega0 = root.objective;
    report.pure_lp = Some(canonical.to_original(omega0));
    let l = l_vector(&root, &canonical)?;

    if options.integrity {
        let shaped = integrity_search(
            &canonical,
            &root,
            options.integrity_iterations,
            &IntegrityOptions::default(),
        )?;
        root.x = shaped.x;
    }
    let candidates = by_fractionality(&root, &canonical, options.max_candidates);
    report.candidates = candidates.len();

    let children_start = Instant::now();
    let (result, files) = if options.mode == Mode::Sequential {
        let branch = BranchOptions {
            warm_start: options.warm_start,
            normalize: options.normalize,
            duals: options.duals,
        };
        let outcome = sequential_combine(&canonical, &root, &candidates, &l, &branch)?;
        report.timings.children_ms = ms(children_start.elapsed());
        (outcome.result, outcome.files)
    } else {
        let branched = branch_all(&canonical, &root, &l, &candidates, options)?;
        report.timings.children_ms = ms(children_start.elapsed());
        report.fixings = branched.fixings;
        if branched.infeasible {
            report.status = RunStatus::IntegerInfeasible;
            report.timings.total_ms = ms(start.elapsed());
            return Ok(report);
        }
        let combining_start = Instant::now();
        let result = match options.mode {
            Mode::Simple => combine(&branched.files, &l, omega0)?,
            Mode::Complex => complex(&canonical, &root, &l, &branched, options)?,
            Mode::Huge => huge(&canonical, &root, &branched.files, options)?,
            Mode::Sequential => unreachable!(),
        };
        report.timings.combining_ms = ms(combining_start.elapsed());
        (result, branched.files)
    };

    report.branches = files.len();
    report.degree = result.degree;
    report.bound_inc = result.improvement.max(0.0);
    report.bound = Some(canonical.to_original(omega0 + report.bound_inc));
    if options.cuts {
        report.cuts = cuts_for_files(&files, &canonical)
            .iter()
            .map(|cut| format_row(model, &cut.original))
            .collect();
    }
    report.timings.total_ms = ms(start.elapsed());
    Ok(report)
}

fn complex(
    model: &CanonicalModel,
    root: &LpSolution,
    l: &conbranch_core::RVector,
    branched: &Branched,
    options: &PipelineOptions,
) -> conbranch_core::Result<CombineResult> {
    let anchors = generate_anchors(model, root, options.anchors, options.seed)?;
    let first = combine_complex(&branched.columns, &anchors, l, root.objective)?;
    let merged = merge_columns(&branched.columns, &first)?;
    let extended: Vec<Vec<File>> = branched
        .columns
        .iter()
        .zip(merged)
        .map(|(columns, merged)| {
            let mut columns = columns.clone();
            if !columns.contains(&merged) {
                columns.push(merged);
            }
            columns
        })
        .collect();
    let second = combine_complex(&extended, &anchors, l, root.objective)?;
    Ok(if second.bound >= first.bound { second } else { first })
}

fn huge(
    model: &CanonicalModel,
    root: &LpSolution,
    files: &[File],
    options: &PipelineOptions,
) -> conbranch_core::Result<CombineResult> {
    let differentiations: Vec<(usize, f64)> = files
        .iter()
        .map(|f| (f.variable, root.x[f.variable].floor()))
        .collect();
    let huge_options = HugeOptions {
        limit: options.huge_limit,
        ..HugeOptions::default()
    };
    let solved = solve_huge(&build_huge_lp(model, &differentiations, &huge_options)?)?;
    let improvement = solved.bound - root.objective;
    // Gains expressed as multiples of each file's own gain.
    let degree = files
        .iter()
        .zip(&solved.gains)
        .map(|(f, g)| g / f.gain)
        .sum();
    Ok(CombineResult {
        weights: Vec::new(),
        improvement,
        bound: solved.bound,
        degree,
    })
}
