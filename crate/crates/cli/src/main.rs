//! `qlens`: command-line front end for path-count matrices and their
//! equivalence classes.
//!
//! Exit codes: 0 success / equivalent, 1 not equivalent, 2 invalid input,
//! 3 budget exceeded, 4 verification mismatch.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qlens",
    version,
    about = "Quantum lens space path matrices and their equivalence classes"
)]
pub struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true, env = "QLENS_JOBS")]
    pub jobs: Option<usize>,
    /// Maximum number of vectors an enumeration may visit.
    #[arg(long, global = true, default_value_t = qlens_core::classify::DEFAULT_VECTOR_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    M,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Conjectures,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the path-count matrix of (r; m).
    Matrix {
        #[arg(long)]
        r: u64,
        /// Comma-separated m_1,...,m_n; negative entries are reduced mod r.
        #[arg(long, allow_hyphen_values = true)]
        m: String,
    },
    /// Decide whether two parameter vectors give equivalent matrices.
    Equiv {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_hyphen_values = true)]
        m1: String,
        #[arg(long, allow_hyphen_values = true)]
        m2: String,
    },
    /// Partition all matrices for (r, n) into equivalence classes.
    Classes {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: usize,
    },
    /// Compare the least dimension with several classes against the formula.
    Phitilde {
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Run a verification suite over a list of moduli.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Comma-separated list of moduli.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Random vectors per modulus for the lemma suite.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Count legal paths by exhaustive search (small instances only).
    Paths {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, value_enum, default_value_t = Kind::N)]
        kind: Kind,
    },
    /// Export the graph of (r; m) in DOT format.
    Graph {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, value_enum, default_value_t = Kind::N)]
        kind: Kind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.unwrap_or_else(qlens_core::par::available_jobs);
    if jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(commands::EXIT_INPUT);
    }
    if cli.budget == 0 {
        eprintln!("error: --budget must be at least 1");
        return ExitCode::from(commands::EXIT_INPUT);
    }
    let outcome = qlens_core::par::with_jobs(jobs, || commands::run(&cli));
    let (text, code) = match outcome {
        Ok(out) => (out.text, out.code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(commands::EXIT_INPUT);
    }
    ExitCode::from(code)
}
