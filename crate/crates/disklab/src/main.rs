//! `disklab`: checks and demos for filtered L∞ algebras and holomorphic
//! disks. Every subcommand prints a [`report::Report`] and exits with 0 on
//! pass, 1 on fail and 2 on bad input.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{Report, Status};

#[derive(Debug, Parser)]
#[command(name = "disklab", version, about = "Filtered L-infinity algebras and holomorphic disk checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing; only the exit code reports the outcome.
    #[arg(long, global = true, conflicts_with = "json")]
    quiet: bool,
    /// Include wall-clock time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Args)]
pub struct AlgArg {
    /// Algebra in JSON.
    #[arg(long)]
    pub alg: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the L∞ relations on all words up to a length.
    Check {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Transfer the structure to homology and verify the result.
    Transfer {
        #[command(flatten)]
        alg: AlgArg,
        /// Highest arity computed, also the word bound of the checks.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Write the homology algebra here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Maurer-Cartan equation modulo a filtration level.
    McVerify {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        elem: PathBuf,
        #[arg(long, default_value_t = 4)]
        trunc: i64,
    },
    /// Apply the twisted differential of a Maurer-Cartan element twice.
    Twist {
        #[command(flatten)]
        alg: AlgArg,
        /// The Maurer-Cartan element.
        #[arg(long)]
        elem: PathBuf,
        /// The element to differentiate.
        #[arg(long)]
        arg: PathBuf,
        #[arg(long, default_value_t = 4)]
        trunc: i64,
    },
    /// Evaluate the two Fukaya equations.
    FukayaCheck {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long, requires = "chain")]
        beta: Option<PathBuf>,
        /// Right-hand side of the second equation.
        #[arg(long, requires = "beta")]
        chain: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        trunc: i64,
    },
    /// Maslov index bounds in dimension n, optionally testing a list.
    DegreeConstraints {
        #[arg(long)]
        n: i64,
        /// Comma-separated Maslov indices of the α' terms.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mus: Option<Vec<i64>>,
    },
    /// Maslov index of a loop of Lagrangian frames.
    Maslov {
        /// JSON or CSV frames.
        #[arg(long)]
        frames: PathBuf,
        /// Fail unless the index equals this value.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<i64>,
    },
    /// Energy identity for a Blaschke product.
    DiskDemo {
        /// Blaschke configuration in JSON.
        #[arg(long, conflicts_with = "degree")]
        config: Option<PathBuf>,
        /// Use `d` zeros evenly spaced on the circle of radius 1/2.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write 256 boundary samples `theta,re,im` here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The boundary bound of a sampled disk-valued loop.
    Stokes {
        /// JSON or CSV samples `theta,re,im`.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Check the stable-tree conditions.
    TreeValidate {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Search for an equivalence between two stable trees.
    TreeEqual {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Two-disk limit of a bubbling family of (1,1) disks on the torus.
    GromovT2 {
        /// Angle of the first boundary coordinate at the marked point.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z2: f64,
        /// Angle of the second fixed point of the family.
        #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
        w: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        rate: f64,
        #[arg(long, default_value_t = 20)]
        steps: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the concatenated boundary loop `t,re1,im1,re2,im2` here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Transfer { .. } => "transfer",
            Command::McVerify { .. } => "mc-verify",
            Command::Twist { .. } => "twist",
            Command::FukayaCheck { .. } => "fukaya-check",
            Command::DegreeConstraints { .. } => "degree-constraints",
            Command::Maslov { .. } => "maslov",
            Command::DiskDemo { .. } => "disk-demo",
            Command::Stokes { .. } => "stokes",
            Command::TreeValidate { .. } => "tree-validate",
            Command::TreeEqual { .. } => "tree-equal",
            Command::GromovT2 { .. } => "gromov-t2",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let start = Instant::now();
    let mut report = commands::run(&cli.command).unwrap_or_else(|e| Report::error(name, e.to_string()));
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if cli.json {
        println!("{}", report.to_json());
    } else if !cli.quiet {
        let text = report.to_text();
        if report.status == Status::Error {
            eprint!("{text}");
        } else {
            print!("{text}");
        }
    }
    ExitCode::from(report.status.exit_code() as u8)
}
