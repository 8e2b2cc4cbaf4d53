use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conbranch::{emit_report, parse_model, run_pipeline, Mode, PipelineOptions, ReportFormat};

#[derive(Parser)]
#[command(name = "conbranch", version, about = "Strengthen the LP bound of a MILP by branching concurrently")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the LP relaxation, branch on every fractional variable once and
    /// combine the branchings into a stronger bound.
    Solve {
        /// Model file, MPS or native format.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "simple")]
        mode: Mode,
        /// Keep the raw case deltas instead of scaling cases to a common gain.
        #[arg(long)]
        no_normalize: bool,
        /// Print one cutting plane per improving branching.
        #[arg(long)]
        cuts: bool,
        /// Move the root point towards integrality before choosing candidates.
        #[arg(long)]
        integrity: bool,
        /// Re-solve every case trading gain against dual consumption.
        #[arg(long)]
        refine: bool,
        /// Solve every child from scratch.
        #[arg(long)]
        no_warm_start: bool,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Seed for anchor generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Branch only on this many of the most fractional variables.
        #[arg(long)]
        max_candidates: Option<usize>,
        /// Alternative root duals offered to the complex mode.
        #[arg(long, default_value_t = 0)]
        anchors: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Solve {
        file,
        mode,
        no_normalize,
        cuts,
        integrity,
        refine,
        no_warm_start,
        json,
        seed,
        max_candidates,
        anchors,
    } = cli.command;

    let text = match std::fs::read_to_string(&file) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: {}: {err}", file.display());
            return ExitCode::from(2);
        }
    };
    let model = match parse_model(&text) {
        Ok(model) => model,
        Err(err) => {
            eprintln!("error: {}: {err}", file.display());
            return ExitCode::from(2);
        }
    };
    let options = PipelineOptions {
        mode,
        normalize: !no_normalize,
        cuts,
        integrity,
        refine,
        warm_start: !no_warm_start,
        seed,
        max_candidates,
        anchors,
        ..PipelineOptions::default()
    };
    let report = match run_pipeline(&model, &options) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(3);
        }
    };
    if json {
        println!("{}", emit_report(std::slice::from_ref(&report), ReportFormat::Json));
    } else {
        print!("{}", emit_report(std::slice::from_ref(&report), ReportFormat::Table));
        for cut in &report.cuts {
            println!("{cut}");
        }
    }
    ExitCode::SUCCESS
}
