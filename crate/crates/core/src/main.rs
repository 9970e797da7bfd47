//! `qmetric`: distances, axiom conformance and experiment sweeps from the
//! command line.
//!
//! Exit codes: 0 when every verdict is consistent (or every claimed axiom
//! passes), 1 when any is not, 2 on usage, input or configuration errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmetric::experiments::{
    balanced_factors, cmd_axioms, cmd_concentration, cmd_discriminate, cmd_dist, cmd_inequalities, cmd_qfi,
    exit_code, write_records, write_report, DistanceKind, ExperimentConfig, ExperimentRecord, OutputFormat,
    QfiFamily, CANDIDATE_HELP,
};
use qmetric::harness::ConformanceConfig;
use qmetric::hilbert::EntropyBase;
use qmetric::io::read_state;
use qmetric::operational::QFI_DEFAULT_STEP;
use qmetric::{Error, Result};

#[derive(Parser)]
#[command(name = "qmetric", version, about = "Distances on pure quantum states: evaluation, axiom checks and experiment sweeps")]
struct Cli {
    /// Root seed of every random stream.
    #[arg(long, global = true, env = "QMETRIC_SEED", default_value_t = 42)]
    seed: u64,
    /// Samples per suite and dimension (trials per axiom for `axioms`).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Comma-separated Hilbert-space dimensions.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Logarithm base for entanglement entropy.
    #[arg(long = "entropy-base", global = true, value_enum, default_value = "e")]
    entropy_base: Base,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Subcommand)]
enum Command {
    /// Distances, overlap and fidelity between two state files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Comma-separated subset of fs, bures, trace, fidelity, overlap, hilbert, entanglement, or `all`.
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Axiom conformance report for a distance candidate.
    #[command(after_help = format!("Candidates: {CANDIDATE_HELP}"))]
    Axioms {
        candidate: String,
        /// Tensor factorization for bipartite candidates, e.g. 2x3.
        #[arg(long, default_value = "2x2")]
        factors: String,
    },
    /// Inequality suites over random pairs and triples.
    Inequalities,
    /// Overlap concentration of Haar-random pairs.
    Concentration,
    /// Helstrom discrimination of two state files.
    Discriminate { a: PathBuf, b: PathBuf },
    /// Finite-difference quantum Fisher information of a built-in family.
    Qfi {
        /// qubit-rotation, qubit-phase or constant.
        #[arg(long, default_value = "qubit-rotation")]
        family: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = QFI_DEFAULT_STEP)]
        step: f64,
    },
}

fn parse_factors(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::parse("--factors", format!("expected AxB with A, B >= 1, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_which(s: &str) -> Result<Option<Vec<DistanceKind>>> {
    if s == "all" {
        return Ok(None);
    }
    s.split(',').map(|k| k.trim().parse()).collect::<Result<Vec<_>>>().map(Some)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<i32> {
    let format = match cli.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let base = match cli.entropy_base {
        Base::E => EntropyBase::Natural,
        Base::Two => EntropyBase::Two,
    };
    let config = |dims: &[usize], samples: usize| ExperimentConfig {
        seed: cli.seed,
        dims: cli.dims.clone().unwrap_or_else(|| dims.to_vec()),
        samples: cli.samples.unwrap_or(samples),
        entropy_base: base,
    };
    let emit = |name: &str, cfg: &ExperimentConfig, records: &[ExperimentRecord]| -> Result<i32> {
        let mut out = output(cli.out.as_deref())?;
        write_records(&mut out, format, name, cfg, records)?;
        out.flush()?;
        Ok(exit_code(records))
    };

    match &cli.command {
        Command::Dist { a, b, which } => {
            let which = parse_which(which)?;
            let rec = cmd_dist(&read_state(a)?, &read_state(b)?, which.as_deref(), base)?;
            emit("dist", &config(&[rec.dim.unwrap_or(2)], 1), &[rec])
        }
        Command::Discriminate { a, b } => {
            let rec = cmd_discriminate(&read_state(a)?, &read_state(b)?)?;
            emit("discriminate", &config(&[rec.dim.unwrap_or(2)], 1), &[rec])
        }
        Command::Qfi { family, theta, step } => {
            let rec = cmd_qfi(family.parse::<QfiFamily>()?, *theta, *step)?;
            emit("qfi", &config(&[2], 1), &[rec])
        }
        Command::Inequalities => {
            let cfg = config(&[2, 8, 64], 10_000);
            let records = cmd_inequalities(&cfg)?;
            emit("inequalities", &cfg, &records)
        }
        Command::Concentration => {
            let cfg = config(&[2, 8, 64, 512, 1000], 10_000);
            let records = cmd_concentration(&cfg)?;
            emit("concentration", &cfg, &records)
        }
        Command::Axioms { candidate, factors } => {
            let factors = parse_factors(factors)?;
            let defaults = ConformanceConfig::default();
            let dims = cli.dims.clone().unwrap_or(defaults.dims.clone());
            let dims_ab = if cli.dims.is_some() {
                dims.iter().filter_map(|&d| balanced_factors(d)).collect()
            } else {
                defaults.dims_ab.clone()
            };
            let cfg = ConformanceConfig {
                dims,
                dims_ab,
                trials: cli.samples.unwrap_or(defaults.trials),
                seed: cli.seed,
            };
            let report = cmd_axioms(candidate, factors, base, &cfg)?;
            let mut out = output(cli.out.as_deref())?;
            write_report(&mut out, format, &report)?;
            out.flush()?;
            Ok(i32::from(!report.claims_met()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
