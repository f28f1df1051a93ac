//! `pellet`: annulus bounds for polynomial and matrix polynomial zeros.
//!
//! Exit status: 0 when every requested analysis completed (a "no" verdict
//! included), 2 for unreadable or invalid input, 3 for numerical failure.

mod curves;
mod report;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pellet::{NormKind, PelletInstance, Polynomial, SolverOptions, DEFAULT_TOL};

use crate::curves::{curves_csv, Grid};
use crate::report::Report;
use crate::run::{Failure, RunOptions, Selection};

#[derive(Parser)]
#[command(
    name = "pellet",
    version,
    about = "Pellet annulus bounds for polynomial zeros"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a scalar polynomial file
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Analyze a matrix polynomial file with an induced norm
    Matrix {
        file: PathBuf,
        /// one, inf or two
        #[arg(long)]
        norm: NormKind,
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sample phi and its majorants as CSV
    Curves {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Fit point for the majorants; defaults to x*
        #[arg(long)]
        x_bar: Option<f64>,
        /// a:b:points
        #[arg(long)]
        grid: Grid,
        /// Write to this file instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Select {
    /// Analyze a single index
    #[arg(long)]
    k: Option<usize>,
    /// Analyze every Newton polygon candidate
    #[arg(long)]
    all_k: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Cap on outer iterations per radius
    #[arg(long)]
    max_iter: Option<usize>,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
    /// Cross-check with all roots and bisection radii
    #[arg(long)]
    verify: bool,
    /// Include the iterate sequences
    #[arg(long)]
    trace: bool,
}

impl RunArgs {
    fn options(&self, select: &Select) -> Result<RunOptions, Failure> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Failure::Input(format!(
                "--tol must be in (0, 1), got {}",
                self.tol
            )));
        }
        let mut solver = SolverOptions::with_tol(self.tol);
        if let Some(m) = self.max_iter {
            solver.max_outer = m;
        }
        Ok(RunOptions {
            selection: match select.k {
                Some(k) => Selection::Single(k),
                None => Selection::All,
            },
            solver,
            verify: self.verify,
            trace: self.trace,
        })
    }
}

/// Writes to stdout; a closed pipe (`pellet ... | head`) is not an error.
fn print_out(text: &str) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::Input(format!("cannot write output: {e}")))
        }
        _ => Ok(()),
    }
}

fn emit(report: &Report, json: bool) -> Result<(), Failure> {
    if json {
        let mut text = serde_json::to_string_pretty(report)
            .map_err(|e| Failure::Numerical(format!("cannot serialize report: {e}")))?;
        text.push('\n');
        print_out(&text)?;
    } else {
        print_out(&report.render_text())?;
    }
    for note in run::diagnostics(report) {
        eprintln!("{note}");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Analyze { file, select, run } => {
            let opts = run.options(&select)?;
            let input = run::read_input(&file)?;
            let report = run::analyze_polynomial(&input, &opts)?;
            emit(&report, run.json)?;
            Ok(run::exit_status(&report, opts.selection))
        }
        Command::Matrix {
            file,
            norm,
            select,
            run,
        } => {
            let opts = run.options(&select)?;
            let input = run::read_input(&file)?;
            let report = run::analyze_matrix(&input, norm, &opts)?;
            emit(&report, run.json)?;
            Ok(run::exit_status(&report, opts.selection))
        }
        Command::Curves {
            file,
            k,
            x_bar,
            grid,
            output,
        } => {
            let input = run::read_input(&file)?;
            let p = Polynomial::from_json(&input.text)?;
            let inst = PelletInstance::from_polynomial(&p, k)?;
            // An unusable fit point is a bad argument, not a numerical failure.
            let csv = curves_csv(&inst, x_bar, &grid).map_err(|e| Failure::Input(e.to_string()))?;
            match output {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
                None => print_out(&csv)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
