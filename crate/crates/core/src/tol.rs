//! Numerical tolerances shared by every module.

/// Primal feasibility of rows and bounds.
pub const FEASIBILITY: f64 = 1e-9;
/// Dual feasibility and optimality checks.
pub const OPTIMALITY: f64 = 1e-7;
/// Distance to the nearest integer below which a value counts as integral.
pub const INTEGRALITY: f64 = 1e-6;
/// Smallest admissible pivot element.
pub const PIVOT: f64 = 1e-10;
/// Gains at or below this are treated as "no progress".
pub const GAIN: f64 = 1e-9;
