//! Combining LPs: how strongly files can be applied at the same time.
//!
//! Every form shares one constraint family, the *stock*: for each `>=` row and
//! each structural variable, the weighted deltas of all applied files may not
//! exceed the root's dual value or reduced cost there. Any point satisfying it
//! certifies `omega_0 + sum of weighted gains` as a lower bound of the MILP.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::branching::{branch_row, build_file, is_fractional, BranchDirection, BranchOptions, Case, File};
use crate::dual::{append_dual_block, dual_objective_terms, solve_model};
use crate::error::{Error, Result};
use crate::model::{
    canonicalize, CanonicalKind, CanonicalModel, DeltaVector, LVector, Model, RIndex, Row,
    RowKind, Sense, Variable,
};
use crate::simplex::{solve_lp, LpSolution, LpStatus};

/// Deltas at or below this never bind a stock row.
const STOCK_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ColumnKey {
    /// Column `column` of file `file`.
    File { file: usize, column: usize },
    Anchor(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombineResult {
    pub weights: Vec<(ColumnKey, f64)>,
    pub improvement: f64,
    /// `omega_0 + improvement`, minimize sense.
    pub bound: f64,
    /// Sum of file weights.
    pub degree: f64,
}

impl CombineResult {
    fn trivial(omega0: f64) -> Self {
        Self {
            weights: Vec::new(),
            improvement: 0.0,
            bound: omega0,
            degree: 0.0,
        }
    }

    pub fn weight(&self, key: ColumnKey) -> f64 {
        self.weights
            .iter()
            .find(|(k, _)| *k == key)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Total weight over all columns of file `file`.
    pub fn file_weight(&self, file: usize) -> f64 {
        self.weights
            .iter()
            .filter(|(k, _)| matches!(k, ColumnKey::File { file: f, .. } if *f == file))
            .map(|&(_, w)| w)
            .sum()
    }

    /// Number of file columns with weight above `threshold`.
    pub fn active_files(&self, threshold: f64) -> usize {
        self.weights
            .iter()
            .filter(|(k, w)| matches!(k, ColumnKey::File { .. }) && *w > threshold)
            .count()
    }
}

/// Delta of an alternative optimal root dual; it costs no gain.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorColumn {
    pub delta: DeltaVector,
    pub point: Vec<f64>,
}

struct Column<'a> {
    key: ColumnKey,
    delta: &'a DeltaVector,
    gain: f64,
}

fn stock_label(r: RIndex) -> alloc::string::String {
    match r {
        RIndex::Row(m) => format!("row{m}"),
        RIndex::Var(n) => format!("var{n}"),
    }
}

fn columns_model(columns: &[Column<'_>], l: &LVector) -> Result<Model> {
    let mut model = Model::new("combining", Sense::Maximize);
    for column in columns {
        let id = match column.key {
            ColumnKey::File { file, column } => format!("lambda{file}.{column}"),
            ColumnKey::Anchor(a) => format!("anchor{a}"),
        };
        model.add_variable(Variable::continuous(id, 0.0, f64::INFINITY, column.gain))?;
    }
    for (r, lr) in l.iter() {
        if !columns.iter().any(|c| c.delta.get(r) > STOCK_EPS) {
            continue;
        }
        let coefficients = columns
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.delta.get(r)))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        model.add_row(Row::new(stock_label(r), RowKind::Le, coefficients, lr.max(0.0)))?;
    }
    Ok(model)
}

fn solve_columns(columns: &[Column<'_>], l: &LVector, omega0: f64) -> Result<CombineResult> {
    if columns.is_empty() {
        return Ok(CombineResult::trivial(omega0));
    }
    let canonical = canonicalize(&columns_model(columns, l)?)?;
    let solution = solve_lp(&canonical, None)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Infeasible => return Err(Error::Internal("combining LP infeasible at zero")),
    }
    let weights: Vec<(ColumnKey, f64)> = columns
        .iter()
        .zip(&solution.x)
        .map(|(c, &w)| (c.key, w.max(0.0)))
        .collect();
    let improvement = columns
        .iter()
        .zip(&weights)
        .map(|(c, &(_, w))| c.gain * w)
        .sum::<f64>()
        .max(0.0);
    let degree = weights
        .iter()
        .filter(|(k, _)| matches!(k, ColumnKey::File { .. }))
        .map(|&(_, w)| w)
        .sum();
    Ok(CombineResult {
        weights,
        improvement,
        bound: omega0 + improvement,
        degree,
    })
}

/// The simple combining LP: one weight per file, one `<=` stock row per index
/// some file actually consumes, objective `max sum_i gain_i * lambda_i`.
pub fn build_combining_lp(files: &[File], l: &LVector) -> Result<CanonicalModel> {
    let columns = file_columns(files);
    canonicalize(&columns_model(&columns, l)?)
}

fn file_columns(files: &[File]) -> Vec<Column<'_>> {
    files
        .iter()
        .map(|f| Column {
            key: ColumnKey::File {
                file: f.id,
                column: 0,
            },
            delta: &f.delta,
            gain: f.gain,
        })
        .collect()
}

/// Solves the simple combining LP. `omega0` is the root objective.
pub fn combine(files: &[File], l: &LVector, omega0: f64) -> Result<CombineResult> {
    solve_columns(&file_columns(files), l, omega0)
}

/// Combining LP with several columns per file plus gain-free anchor columns.
pub fn combine_complex(
    file_columns: &[Vec<File>],
    anchors: &[AnchorColumn],
    l: &LVector,
    omega0: f64,
) -> Result<CombineResult> {
    let mut columns = Vec::new();
    for files in file_columns {
        for (k, f) in files.iter().enumerate() {
            columns.push(Column {
                key: ColumnKey::File {
                    file: f.id,
                    column: k,
                },
                delta: &f.delta,
                gain: f.gain,
            });
        }
    }
    for (a, anchor) in anchors.iter().enumerate() {
        columns.push(Column {
            key: ColumnKey::Anchor(a),
            delta: &anchor.delta,
            gain: 0.0,
        });
    }
    solve_columns(&columns, l, omega0)
}

/// Replaces the active columns of each file by their weighted sum, built case
/// by case from the underlying displacements. Files with at most one active
/// column pass through unchanged.
pub fn merge_columns(file_columns: &[Vec<File>], result: &CombineResult) -> Result<Vec<File>> {
    let mut merged = Vec::with_capacity(file_columns.len());
    for files in file_columns {
        let active: Vec<(&File, f64)> = files
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let key = ColumnKey::File {
                    file: f.id,
                    column: k,
                };
                (f, result.weight(key))
            })
            .filter(|&(_, w)| w > 1e-7)
            .collect();
        match active.as_slice() {
            [] => {
                if let Some(first) = files.first() {
                    merged.push(first.clone());
                }
            }
            [(only, _)] => merged.push((*only).clone()),
            _ => merged.push(merge_weighted(&active)?),
        }
    }
    Ok(merged)
}

/// `sum_k w_k f_k`, summing case displacements per case index.
pub fn merge_weighted(parts: &[(&File, f64)]) -> Result<File> {
    let (first, _) = parts.first().ok_or(Error::EmptyFile)?;
    let mut cases: Vec<Case> = Vec::with_capacity(first.cases.len());
    for (j, template) in first.cases.iter().enumerate() {
        let mut delta = DeltaVector::new();
        let mut gain = 0.0;
        for &(file, w) in parts {
            let case = file.cases.get(j).ok_or(Error::Internal("files differ in case count"))?;
            delta.add_scaled(&case.delta, w);
            gain += w * case.gain;
        }
        cases.push(Case {
            delta,
            gain,
            scale: 1.0,
            ..template.clone()
        });
    }
    build_file(cases, false)
}

/// Alternative optimal root duals found by minimizing random weightings of
/// the dual values over the optimal dual face.
pub fn generate_anchors(
    model: &CanonicalModel,
    root: &LpSolution,
    count: usize,
    seed: u64,
) -> Result<Vec<AnchorColumn>> {
    if !root.is_optimal() {
        return Err(Error::NotOptimal(root.status));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anchors: Vec<AnchorColumn> = Vec::new();
    for _ in 0..count {
        let mut dual = Model::new("anchor", Sense::Minimize);
        let offset = append_dual_block(&mut dual, model, "", 0.0)?;
        for (m, row) in model.rows().iter().enumerate() {
            if row.kind == CanonicalKind::Ge {
                dual.set_objective(offset + m, rng.random_range(-1.0..1.0));
            }
        }
        dual.add_row(Row::new(
            "optimal-face",
            RowKind::Eq,
            dual_objective_terms(model, offset),
            root.objective,
        ))?;
        let (_, solution) = solve_model(&dual)?;
        if !solution.is_optimal() {
            continue;
        }
        let point = solution.x[offset..offset + model.num_rows()].to_vec();
        let alt = LpSolution::from_dual(model, point.clone());
        let delta = crate::branching::case_delta(root, &alt, model)?;
        let trivial = delta.iter().all(|(_, v)| v.abs() <= 1e-9);
        let seen = anchors.iter().any(|a| a.delta.max_abs_diff(&delta) <= 1e-9);
        if !trivial && !seen {
            anchors.push(AnchorColumn { delta, point });
        }
    }
    Ok(anchors)
}

/// Files accepted by [`sequential_combine`] together with their result.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialOutcome {
    pub result: CombineResult,
    pub files: Vec<File>,
}

/// Builds files one after another; each child is solved in dual space with
/// the restriction that it only consumes the stock the accepted files left
/// over. Every accepted file therefore gets weight one.
pub fn sequential_combine(
    model: &CanonicalModel,
    root: &LpSolution,
    candidates: &[usize],
    l: &LVector,
    options: &BranchOptions,
) -> Result<SequentialOutcome> {
    if !root.is_optimal() {
        return Err(Error::NotOptimal(root.status));
    }
    let mut stock: LVector = l.iter().map(|(r, v)| (r, v.max(0.0))).collect();
    let mut files = Vec::new();
    let mut result = CombineResult::trivial(root.objective);
    for (id, &variable) in candidates.iter().enumerate() {
        let value = root.x[variable];
        if !is_fractional(value) {
            continue;
        }
        let floor = libm::floor(value);
        let mut cases = Vec::with_capacity(2);
        for (j, direction) in [BranchDirection::Down, BranchDirection::Up].into_iter().enumerate() {
            let row = branch_row(model, variable, direction, floor);
            let child_model = model.with_row(row.clone());
            let Some(y) = restricted_child(&child_model, model, root, &stock)? else {
                break;
            };
            let child = LpSolution::from_dual(&child_model, y);
            cases.push(Case::new(id, j, row, root, child, model)?);
        }
        if cases.len() != 2 {
            continue;
        }
        let file = build_file(cases, options.normalize)?;
        if !file.improving {
            continue;
        }
        for (r, v) in file.delta.iter() {
            if stock.contains(r) {
                let left = stock.get(r) - v;
                stock.insert(r, left.max(0.0));
            }
        }
        result.weights.push((
            ColumnKey::File {
                file: id,
                column: 0,
            },
            1.0,
        ));
        result.improvement += file.gain;
        result.degree += 1.0;
        files.push(file);
    }
    result.bound = root.objective + result.improvement;
    Ok(SequentialOutcome { result, files })
}

/// Best dual point of `child` with `y'_m >= y_m - stock_m` on the parent's
/// `>=` rows, or `None` if that LP has no optimum.
fn restricted_child(
    child: &CanonicalModel,
    parent: &CanonicalModel,
    root: &LpSolution,
    stock: &LVector,
) -> Result<Option<Vec<f64>>> {
    let mut dual = Model::new("sequential", Sense::Maximize);
    let offset = append_dual_block(&mut dual, child, "", 1.0)?;
    for (m, row) in parent.rows().iter().enumerate() {
        if row.kind != CanonicalKind::Ge {
            continue;
        }
        let floor = root.y[m] - stock.get(RIndex::Row(m));
        if floor > STOCK_EPS {
            dual.add_row(Row::new(
                format!("stock{m}"),
                RowKind::Ge,
                vec![(offset + m, 1.0)],
                floor,
            ))?;
        }
    }
    let (_, solution) = solve_model(&dual)?;
    if !solution.is_optimal() {
        return Ok(None);
    }
    Ok(Some(solution.x[offset..offset + child.num_rows()].to_vec()))
}

/// Variable limit for [`build_huge_lp`].
pub const HUGE_LP_LIMIT: usize = 20_000;

/// One LP holding a root dual point, one dual point per case, file deltas
/// and gains, and the stock rows tying them together.
#[derive(Debug, Clone)]
pub struct HugeLp {
    pub canonical: CanonicalModel,
    pub root_offset: usize,
    pub gain_offset: usize,
    pub differentiations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HugeResult {
    /// Minimize-sense lower bound; `+inf` if the LP is unbounded.
    pub bound: f64,
    /// Gain per differentiation.
    pub gains: Vec<f64>,
    pub root_point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HugeOptions {
    pub limit: usize,
    /// Also require every case point to be nonnegative on the parent rows.
    /// The stock rows already keep every combined point nonnegative, so this
    /// only tightens the LP.
    pub case_nonnegativity: bool,
}

impl Default for HugeOptions {
    fn default() -> Self {
        Self {
            limit: HUGE_LP_LIMIT,
            case_nonnegativity: false,
        }
    }
}

/// Builds the complete combining LP over `differentiations` given as
/// `(variable, floor)` pairs, each split into `x <= floor` and
/// `x >= floor + 1`.
///
/// Variable stock entries are left out: structural variables are free in
/// canonical form, so every reduced-cost delta is identically zero.
pub fn build_huge_lp(
    model: &CanonicalModel,
    differentiations: &[(usize, f64)],
    options: &HugeOptions,
) -> Result<HugeLp> {
    let rows = model.num_rows();
    let stock_rows: Vec<usize> = (0..rows)
        .filter(|&m| model.rows()[m].kind == CanonicalKind::Ge)
        .collect();
    let f = differentiations.len();
    let size = rows + f * 2 * (rows + 1) + f * stock_rows.len() + f;
    if size > options.limit {
        return Err(Error::TooLarge {
            variables: size,
            limit: options.limit,
        });
    }

    let mut lp = Model::new("huge", Sense::Maximize);
    let root_offset = append_dual_block(&mut lp, model, "y0.", 1.0)?;
    let root_terms = dual_objective_terms(model, root_offset);
    let gain_offset = lp.variables().len();
    for i in 0..f {
        lp.add_variable(Variable::continuous(format!("omega{i}"), 0.0, f64::INFINITY, 1.0))?;
    }
    let delta_offset = lp.variables().len();
    for i in 0..f {
        for &m in &stock_rows {
            lp.add_variable(Variable::continuous(
                format!("delta{i}.{m}"),
                f64::NEG_INFINITY,
                f64::INFINITY,
                0.0,
            ))?;
        }
    }
    let delta_var = |i: usize, s: usize| delta_offset + i * stock_rows.len() + s;

    for (i, &(variable, floor)) in differentiations.iter().enumerate() {
        for (j, direction) in [BranchDirection::Down, BranchDirection::Up].into_iter().enumerate() {
            let child = model.with_row(branch_row(model, variable, direction, floor));
            let prefix = format!("y{i}.{j}.");
            let offset = append_dual_block(&mut lp, &child, &prefix, 0.0)?;
            if !options.case_nonnegativity {
                for m in 0..rows {
                    lp.set_bounds(offset + m, f64::NEG_INFINITY, f64::INFINITY);
                }
            }
            // omega_i <= b_ij . y_ij - b . y0
            let mut coefficients = vec![(gain_offset + i, 1.0)];
            coefficients.extend(dual_objective_terms(&child, offset).into_iter().map(|(k, b)| (k, -b)));
            coefficients.extend(root_terms.iter().copied());
            lp.add_row(Row::new(format!("gain{i}.{j}"), RowKind::Le, coefficients, 0.0))?;
            // delta_i^m >= y0_m - y_ij_m
            for (s, &m) in stock_rows.iter().enumerate() {
                lp.add_row(Row::new(
                    format!("max{i}.{j}.{m}"),
                    RowKind::Ge,
                    vec![(delta_var(i, s), 1.0), (root_offset + m, -1.0), (offset + m, 1.0)],
                    0.0,
                ))?;
            }
        }
    }
    for (s, &m) in stock_rows.iter().enumerate() {
        let mut coefficients: Vec<(usize, f64)> = (0..f).map(|i| (delta_var(i, s), 1.0)).collect();
        coefficients.push((root_offset + m, -1.0));
        lp.add_row(Row::new(format!("stock{m}"), RowKind::Le, coefficients, 0.0))?;
    }
    Ok(HugeLp {
        canonical: canonicalize(&lp)?,
        root_offset,
        gain_offset,
        differentiations: f,
    })
}

pub fn solve_huge(huge: &HugeLp) -> Result<HugeResult> {
    let solution = solve_lp(&huge.canonical, None)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => {
            return Ok(HugeResult {
                bound: f64::INFINITY,
                gains: Vec::new(),
                root_point: Vec::new(),
            })
        }
        LpStatus::Infeasible => return Err(Error::Internal("huge LP infeasible")),
    }
    let gains = solution.x[huge.gain_offset..huge.gain_offset + huge.differentiations].to_vec();
    let root_point = solution.x[huge.root_offset..huge.gain_offset].to_vec();
    Ok(HugeResult {
        bound: -solution.objective,
        gains,
        root_point,
    })
}

/// Indices with a stock entry that some file consumes; the rows that survive
/// in the simple combining LP.
pub fn binding_candidates(files: &[File], l: &LVector) -> BTreeSet<RIndex> {
    l.keys()
        .filter(|&r| files.iter().any(|f| f.delta.get(r) > STOCK_EPS))
        .collect()
}
