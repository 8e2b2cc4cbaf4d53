//! File formats, the end-to-end pipeline and report output for
//! [`conbranch_core`].
//!
//! ```no_run
//! use conbranch::{emit_report, parse_native, run_pipeline, PipelineOptions, ReportFormat};
//!
//! let text = std::fs::read_to_string("model.lp").unwrap();
//! let model = parse_native(&text).unwrap();
//! let report = run_pipeline(&model, &PipelineOptions::default()).unwrap();
//! print!("{}", emit_report(&[report], ReportFormat::Table));
//! ```

pub mod error;
pub mod mps;
pub mod native;
pub mod pipeline;
pub mod report;

pub use error::ParseError;
pub use mps::parse_mps;
pub use native::{format_row, parse_native, write_native};
pub use pipeline::{run_pipeline, Mode, PipelineOptions, PipelineReport, RunStatus, Timings};
pub use report::{emit_report, ReportFormat};

/// Parses MPS if the text looks like MPS, the native format otherwise.
pub fn parse_model(text: &str) -> Result<conbranch_core::Model, ParseError> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('*') && !l.starts_with('#'));
    match first.and_then(|l| l.split_whitespace().next()) {
        Some("NAME" | "ROWS" | "OBJSENSE") => parse_mps(text),
        _ => parse_native(text),
    }
}
