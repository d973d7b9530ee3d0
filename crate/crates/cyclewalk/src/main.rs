//! Command-line front end: build, canonicalize, compare, simulate, and
//! sample cycle walks through JSON and CSV files.
//!
//! Exit codes: 0 success (and "equivalent" verdicts), 1 not equivalent,
//! 2 file access or parse failure, 3 domain invariant violated, 4 witness
//! verification failure, 5 indeterminate degenerate verdict.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use cyclewalk::canonical::{
    are_equivalent, canonicalize_with_tolerance, CanonicalError, EquivalenceStatus,
};
use cyclewalk::dynamics::{distributions, spectrum, DynamicsError, NORM_EPS};
use cyclewalk::formats::{self, FormatError};
use cyclewalk::walk::{
    random_cycle_walk, random_translation_invariant, WalkError, UNITARITY_EPS,
};

#[derive(Parser)]
#[command(
    name = "cyclewalk",
    version,
    about = "Construct, canonicalize, and compare quantum walks on cycles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_tolerance(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !value.is_finite() || value <= 0.0 {
        return Err("tolerance must be a positive number".into());
    }
    Ok(value)
}

#[derive(Subcommand)]
enum Command {
    /// Build a walk matrix file from canonical parameters.
    Gen {
        /// Canonical parameter file (JSON).
        params: PathBuf,
        /// Walk file to write.
        #[arg(short, long, default_value = "walk.json")]
        output: PathBuf,
    },
    /// Reduce a walk to canonical parameters and a gauge witness.
    Canon {
        /// Walk file (JSON).
        walk: PathBuf,
        /// Unitarity and verification tolerance override.
        #[arg(long, value_parser = parse_tolerance)]
        tol: Option<f64>,
        /// Parameter file to write.
        #[arg(short, long, default_value = "params.json")]
        output: PathBuf,
        /// Witness file to write.
        #[arg(long, default_value = "witness.json")]
        witness: PathBuf,
    },
    /// Decide unitary equivalence of two walks.
    Equiv {
        /// First walk file.
        walk_a: PathBuf,
        /// Second walk file.
        walk_b: PathBuf,
        /// Witness file to write when the walks are equivalent.
        #[arg(long, default_value = "witness.json")]
        witness: PathBuf,
    },
    /// Evolve a state and tabulate per-step vertex distributions.
    Simulate {
        /// Walk file (JSON).
        walk: PathBuf,
        /// Initial state file: JSON array of [re, im] pairs.
        #[arg(long)]
        state: PathBuf,
        /// Number of steps to evolve.
        #[arg(long)]
        steps: usize,
        /// CSV file to write.
        #[arg(short, long, default_value = "distribution.csv")]
        output: PathBuf,
    },
    /// Sample a reproducible random walk.
    Random {
        /// Cycle length.
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        /// Seed for the ChaCha8 stream.
        #[arg(long)]
        seed: u64,
        /// Apply a random gauge from the same stream after sampling.
        #[arg(long, conflicts_with = "translation_invariant")]
        scramble: bool,
        /// Use one shared coin frame for every vertex.
        #[arg(long)]
        translation_invariant: bool,
        /// Walk file to write.
        #[arg(short, long, default_value = "walk.json")]
        output: PathBuf,
    },
    /// Compute the eigenvalue spectrum of a walk.
    Spectrum {
        /// Walk file (JSON).
        walk: PathBuf,
        /// CSV file to write.
        #[arg(short, long, default_value = "spectrum.csv")]
        output: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Format(inner) => inner.exit_code() as u8,
            CliError::Canonical(
                CanonicalError::VerificationFailed { .. }
                | CanonicalError::WitnessVerification { .. },
            ) => 4,
            _ => 3,
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Gen { params, output } => {
            let params = formats::read_params(&params)?;
            for violation in params.range_violations() {
                eprintln!("warning: {violation}");
            }
            let walk = params.build();
            formats::write_walk(&output, &walk)?;
            println!(
                "unitarity_residual {:.16e}",
                walk.matrix().unitarity_residual()
            );
            Ok(0)
        }
        Command::Canon {
            walk,
            tol,
            output,
            witness,
        } => {
            let tolerance = tol.unwrap_or(UNITARITY_EPS);
            let walk = formats::read_walk_with_tolerance(&walk, tolerance)?;
            let canon = canonicalize_with_tolerance(&walk, tolerance)?;
            formats::write_params(&output, &canon.params)?;
            formats::write_witness(&witness, &canon.witness)?;
            let residual = canon
                .witness
                .conjugate_matrix(walk.matrix())
                .max_abs_diff(canon.params.build().matrix());
            println!("verification_residual {residual:.16e}");
            Ok(0)
        }
        Command::Equiv {
            walk_a,
            walk_b,
            witness,
        } => {
            let first = formats::read_walk(&walk_a)?;
            let second = formats::read_walk(&walk_b)?;
            let verdict = are_equivalent(&first, &second)?;
            println!("{} {:.16e}", verdict.status, verdict.max_param_distance);
            if let Some(found) = &verdict.witness {
                formats::write_witness(&witness, found)?;
            }
            Ok(match verdict.status {
                EquivalenceStatus::Equivalent => 0,
                EquivalenceStatus::NotEquivalent => 1,
                EquivalenceStatus::IndeterminateDegenerate => 5,
            })
        }
        Command::Simulate {
            walk,
            state,
            steps,
            output,
        } => {
            let walk = formats::read_walk(&walk)?;
            let (state, deviation) = formats::read_state(&state, walk.n())?;
            if deviation > NORM_EPS {
                eprintln!("warning: state norm deviates by {deviation:.3e}; renormalized");
            }
            let tables = distributions(&walk, &state, steps)?;
            formats::write_distributions_csv(&output, &tables)?;
            Ok(0)
        }
        Command::Random {
            n,
            seed,
            scramble,
            translation_invariant,
            output,
        } => {
            let n = n as usize;
            let walk = if translation_invariant {
                random_translation_invariant(n, seed)?
            } else {
                random_cycle_walk(n, seed, scramble)?
            };
            formats::write_walk(&output, &walk)?;
            Ok(0)
        }
        Command::Spectrum { walk, output } => {
            let walk = formats::read_walk(&walk)?;
            let values = spectrum(&walk)?;
            formats::write_spectrum_csv(&output, &values)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
