//! Command-line front end: loads JSON instances, runs the computations and
//! checkers of `smith_tate`, and prints a report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
//! errors (unknown command, unreadable or malformed input).

mod commands;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use report::{Check, Report};

#[derive(Debug, Parser)]
#[command(name = "smith-tate", version, about = "Exact Z/pZ-equivariant Smith theory checks over F_p")]
pub struct Cli {
    /// Print the report as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tate cohomology dimensions of an equivariant complex.
    Tate(InputArg),
    /// Group cohomology H^k(Z/p; V) from the periodic resolution.
    GroupCohomology {
        #[command(flatten)]
        input: InputArg,
        /// Highest degree to compute (default: 2 * width + 4).
        #[arg(long)]
        max_degree: Option<i64>,
    },
    /// The Frobenius map V -> V^{(x)p} on Tate cohomology.
    QuasiFrobenius {
        #[command(flatten)]
        input: InputArg,
        /// Number of additivity certificates to produce.
        #[arg(long, default_value_t = 4)]
        certificates: usize,
        #[arg(long, env = "SMITH_TATE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Jordan type of sigma and the closed-form Tate/invariant dimensions.
    Decompose {
        /// Module file (complex format with "sigma").
        #[arg(long, alias = "input")]
        sigma: PathBuf,
    },
    /// Smith inequality chain from dim HF(phi) and sigma on HF(phi^p).
    SmithCheck {
        #[arg(long)]
        hf_dim: usize,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Filtration spectral sequences.
    Spectral {
        #[command(subcommand)]
        kind: SpectralKind,
    },
    /// Barcode of an action-filtered complex and window dimensions.
    Barcode {
        #[command(flatten)]
        input: InputArg,
        /// Windows `a:b`; use `-inf` / `inf` for unbounded ends. Repeatable.
        #[arg(long = "window", allow_hyphen_values = true)]
        windows: Vec<String>,
    },
    /// Barcode Smith inequalities between the barcodes of phi and phi^p.
    BarcodeSmith {
        #[arg(long)]
        b1: PathBuf,
        #[arg(long)]
        bp: PathBuf,
    },
    /// Search for a window witnessing nontrivial torsion.
    Torsion {
        /// Barcode file.
        #[command(flatten)]
        input: InputArg,
        /// Compare a spectral norm gamma (rational) with the longest finite bar.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
    },
    /// Wilson constant, local Euler constants and the Morse resolution.
    MorseConstants {
        #[arg(short = 'p', long = "prime")]
        p: u64,
        /// Largest bundle rank n for the local Euler constant.
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        /// Number of degrees of the periodic resolution.
        #[arg(long, default_value_t = 10)]
        length: u32,
    },
    /// Randomized property checks.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpectralKind {
    /// Spectral sequence of the action filtration.
    Action(InputArg),
    /// Algebraic (u, theta) filtration of an equivariant model.
    Algebraic(InputArg),
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// Input JSON file.
    #[arg(long, short = 'i')]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Property name; see --list.
    #[arg(long, required_unless_present_any = ["list", "replay"])]
    pub op: Option<String>,
    #[arg(long, env = "SMITH_TATE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Primes to draw from (repeatable or comma separated).
    #[arg(short = 'p', long = "prime", value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// Write the minimized reproducer of the first failure to this file.
    #[arg(long)]
    pub reproducer_out: Option<PathBuf>,
    /// Re-run a reproducer file instead of generating instances.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// List registered properties.
    #[arg(long)]
    pub list: bool,
}

/// Exit code and rendered output of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr, report: None };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let (mut report, input_error) = match commands::execute(&cli.command) {
        Ok(r) => (r, false),
        Err(e) => {
            let mut r = Report::new(commands::name(&cli.command), String::new());
            r.error = Some(e.to_string());
            (r, true)
        }
    };
    report.timing.elapsed_ms = start.elapsed().as_millis() as u64;
    let code = if input_error {
        2
    } else if report.all_pass() {
        0
    } else {
        1
    };
    let stdout = if cli.json { report.to_json() + "\n" } else { report.to_table() };
    let stderr = report.error.as_ref().map(|e| format!("error: {e}\n")).unwrap_or_default();
    Outcome {
        code,
        stdout,
        stderr,
        report: Some(report),
    }
}
