//! `newtonflow`: find polynomial roots by following the Newton flow.
//!
//! Polynomials are JSON objects `{"coeffs": [[re, im], ...]}` in ascending degree, given
//! inline or as a file path. Exit codes: 0 success, 1 input or I/O error, 2 incomplete
//! solve (partial results are still printed), 3 no certified seed.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use newtonflow::{Complex, SeedMode, SeedOptions, SolveOptions, TraceOptions};

use crate::input::{parse_complex, parse_levels, parse_window};

#[derive(Parser, Debug)]
#[command(
    name = "newtonflow",
    version,
    about = "Polynomial roots by Newton-flow continuation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find all roots and print them as JSON.
    Roots {
        /// Inline JSON or a path to a JSON file.
        input: String,
        #[command(flatten)]
        shared: Shared,
    },
    /// Trace one flow line and print it as tab-separated values.
    Trace {
        input: String,
        /// Start here instead of at a seed.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Option<Complex>,
        /// Use a certified seed and report the forbidden arguments.
        #[arg(long)]
        certified: bool,
        /// Seed attempt index.
        #[arg(long, default_value_t = 0)]
        attempt: usize,
        /// Print every accepted state, not just the seed and the outcome.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        shared: Shared,
    },
    /// Render level lines, flow lines, roots and critical points as SVG.
    Figure {
        /// Defaults to the built-in degree-5 demo polynomial.
        input: Option<String>,
        /// Centre and half extents.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "0,0,2,2")]
        window: [f64; 4],
        /// Grid points per side.
        #[arg(long, default_value_t = 512)]
        res: usize,
        /// Level exponents `a..b` of the lines `|P| = 2^n`.
        #[arg(long, value_parser = parse_levels, allow_hyphen_values = true, default_value = "-4..4")]
        levels: std::ops::RangeInclusive<i32>,
        /// Draw Newton steps, from `--overlay=re,im` or from the certified seed without a value.
        #[arg(long, num_args = 0..=1, require_equals = true, value_parser = parse_complex)]
        overlay: Option<Option<Complex>>,
        #[arg(long)]
        out: std::path::PathBuf,
        #[command(flatten)]
        shared: Shared,
    },
    /// First-step Newton ratio survey and solve timing.
    Bench {
        /// Inline JSON or a path; alternatively use --random.
        input: Option<String>,
        /// Random monic polynomial of degree D from generator seed SEED.
        #[arg(long, num_args = 2, value_names = ["D", "SEED"], conflicts_with = "input")]
        random: Option<Vec<u64>>,
        /// Points on the survey circle.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Survey circle radius, in multiples of the Cauchy bound.
        #[arg(long, default_value_t = 10.0)]
        ring_factor: f64,
        #[command(flatten)]
        shared: Shared,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Certified,
    Ladder,
    Random,
}

/// Solver flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct Shared {
    /// `|P| <= tol_root * scale` counts as a root.
    #[arg(long, default_value = "1e-12")]
    tol_root: f64,
    /// Relative corrector accuracy along the flow.
    #[arg(long, default_value = "1e-10")]
    tol_corrector: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
    seed_mode: ModeArg,
    /// Generator seed for `--seed-mode random`.
    #[arg(long, default_value_t = 1)]
    rng_seed: u64,
    /// Required argument margin of certified seeds [default: pi / (4 max(8, d))].
    #[arg(long)]
    delta_arg: Option<f64>,
    /// Seed radius in multiples of the Cauchy bound.
    #[arg(long, default_value = "2")]
    radius_factor: f64,
    /// Seeds tried per root [default: 4d + 8].
    #[arg(long)]
    max_attempts: Option<usize>,
    /// Print the parsed polynomial as JSON on standard error.
    #[arg(long)]
    echo: bool,
}

impl Shared {
    fn solve_options(&self) -> SolveOptions {
        let seed_mode = match self.seed_mode {
            ModeArg::Certified => SeedMode::Certified,
            ModeArg::Ladder => SeedMode::Ladder,
            ModeArg::Random => SeedMode::Random {
                seed: self.rng_seed,
            },
        };
        SolveOptions {
            seed_mode,
            seed: SeedOptions {
                delta_arg: self.delta_arg,
                radius_factor: self.radius_factor,
            },
            trace: TraceOptions {
                tol_root: self.tol_root,
                tol_corrector: self.tol_corrector,
                ..TraceOptions::default()
            },
            max_attempts: self.max_attempts,
            ..SolveOptions::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(commands::run(cli.command))
}
