// SPDX-License-Identifier: Apache-2.0

//! `qdec`: invariance, stability and asymptotic analysis of quantum channels
//! stored as JSON Kraus lists.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict or unmet
//! precondition, 2 input error, 3 internal inconsistency.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qdec_core::Tolerances;

#[derive(Parser)]
#[command(
    name = "qdec",
    version,
    about = "Analyze iterated quantum channels in Kraus form"
)]
struct Cli {
    /// Spectral tolerance: radii within this distance of 1 count as 1.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,

    /// Analyze channels that are not trace preserving.
    #[arg(long, global = true)]
    allow_non_tp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a channel file is well formed and trace preserving.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Invariance and GAS analysis of a subspace.
    Analyze {
        file: PathBuf,
        /// 1-based kets such as `1,3`, or `@vectors.json`.
        #[arg(long)]
        subspace: String,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Asymptotic probabilities of ending up in each invariant part.
    Asympt {
        file: PathBuf,
        /// Parts separated by `;`, e.g. `1,3;2,4`.
        #[arg(long)]
        parts: String,
        /// `maximally-mixed` or a JSON density-matrix file.
        #[arg(long, default_value = "maximally-mixed")]
        state: String,
        /// GAS subspace containing the parts; the uncovered remainder is reported.
        #[arg(long)]
        container: Option<String>,
        /// Also iterate the map this many steps and report the gap.
        #[arg(long, value_name = "N")]
        oracle: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Write a built-in reference channel as a channel file.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Comma-separated noise weights.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        /// Output path (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Nfd,
    Did,
    Dual,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Toy3,
    #[value(name = "seven_level", alias = "seven-level")]
    SevenLevel,
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Negative verdict or unmet precondition.
    Negative(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Negative(m) | Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<qdec_core::Error> for Failure {
    fn from(err: qdec_core::Error) -> Self {
        use qdec_core::Error as E;
        let msg = err.to_string();
        match err {
            E::NotInvariant { .. }
            | E::NotGas
            | E::NotTracePreserving(_)
            | E::NotOrthogonal(_)
            | E::UnsuccessfulDid => Failure::Negative(msg),
            E::Degenerate(_) | E::Inconsistent(_) | E::Decomposition(_) => Failure::Internal(msg),
            _ => Failure::Input(msg),
        }
    }
}

/// Result of a command: whether the verdict is positive.
pub type Verdict = Result<bool, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tol must be a positive number");
            return ExitCode::from(2);
        }
        tol.spec = t;
    }
    let ctx = commands::Context {
        tol,
        allow_non_tp: cli.allow_non_tp,
    };
    let outcome = match cli.command {
        Command::Validate { file, json } => commands::validate(&ctx, &file, json),
        Command::Analyze {
            file,
            subspace,
            method,
            json,
        } => commands::analyze(&ctx, &file, &subspace, method, json),
        Command::Asympt {
            file,
            parts,
            state,
            container,
            oracle,
            json,
        } => commands::asympt(&ctx, &file, &parts, &state, container.as_deref(), oracle, json),
        Command::Example { name, gammas, output } => {
            commands::example(name, gammas.as_deref(), output.as_deref())
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
