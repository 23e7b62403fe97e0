//! `csbf` - exact verification suites and scenario runner for the
//! three-dimensional Chern-Simons / BF identity family.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 usage or I/O error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csbf_core::report::Report;
use csbf_core::scenario;
use csbf_core::suite::{run_verify, SuiteConfig, SuiteKind};

#[derive(Parser)]
#[command(
    name = "csbf",
    about = "Exact verifier for three-dimensional Chern-Simons / BF identities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Symbolic,
    Instance,
    All,
}

impl From<SuiteArg> for SuiteKind {
    fn from(s: SuiteArg) -> SuiteKind {
        match s {
            SuiteArg::Symbolic => SuiteKind::Symbolic,
            SuiteArg::Instance => SuiteKind::Instance,
            SuiteArg::All => SuiteKind::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    Sl2,
    Sl3,
}

impl AlgebraArg {
    fn name(self) -> &'static str {
        match self {
            AlgebraArg::Sl2 => "sl2",
            AlgebraArg::Sl3 => "sl3",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Omit wall times so reports are byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in identity suites.
    Verify {
        /// Which backend(s) to run.
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Seed for randomized instance generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per check.
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Jet truncation order (instance suites need at least 3).
        #[arg(long, default_value_t = 4)]
        cap: u32,
        /// Structure algebra for instance generation.
        #[arg(long, value_enum, default_value = "sl2")]
        algebra: AlgebraArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a scenario file.
    Scenario {
        /// Path to the scenario file.
        path: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn emit(report: &Report, output: &OutputArgs) -> ExitCode {
    match output.format {
        FormatArg::Text => print!("{}", report.to_text()),
        FormatArg::Json => print!("{}", report.to_json()),
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, seed, trials, cap, algebra, output } => {
            let cfg = SuiteConfig {
                suite: suite.into(),
                seed,
                trials,
                cap,
                algebra: algebra.name().to_string(),
                timing: !output.no_timing,
            };
            match run_verify(&cfg) {
                Ok(report) => emit(&report, &output),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Scenario { path, output } => {
            let src = match fs::read_to_string(&path) {
                Ok(src) => src,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".to_string());
            match scenario::run_scenario_source(&name, &src) {
                Ok(report) => emit(&report, &output),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
