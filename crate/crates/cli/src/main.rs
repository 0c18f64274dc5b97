//! Command-line front end: conversions, verification sweeps, structural
//! dumps, and the delay comparison table.
//!
//! Exit codes: 0 on success, 1 when a verification sweep finds failures,
//! 2 for usage errors. Large numbers are serialized as decimal strings so
//! downstream consumers never face 64-bit overflow.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;
use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;
use tauplus::{
    build_bit_matrix, comparison_table, eval_bit_matrix, fa_count_report, make_tau_plus,
    plan_reduction, reverse_functional, rows_to_csv, verify_exhaustive, verify_sampled,
    x_prime_eq9, ResidueVector, TauPlusSet,
};

#[derive(Parser)]
#[command(name = "tauplus", about = "RNS converter toolkit for the tau+ moduli set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the moduli and derived constants for one q
    Info {
        #[arg(long)]
        q: u32,
    },
    /// Convert a binary operand to its residue record
    Forward {
        #[arg(long)]
        q: u32,
        /// Operand in [0, dynamic range), decimal
        x: String,
    },
    /// Convert residues back to the binary operand
    Reverse {
        #[arg(long)]
        q: u32,
        /// Reverse route; the structural routes need q >= 9
        #[arg(long, value_enum, default_value_t = ReversePath::Functional)]
        path: ReversePath,
        /// x1 x2 x3 in decimal; omit to read a forward JSON record from stdin
        residues: Vec<String>,
    },
    /// Run a verification sweep
    Verify {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value_t = VerifyMode::Sample)]
        mode: VerifyMode,
        /// Sample count for sampled mode
        #[arg(short = 'n', long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; default from RNS_WORKERS or the machine
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Dump the thirteen-row bit matrix (q >= 9)
    Matrix {
        #[arg(long)]
        q: u32,
    },
    /// Dump the reduction plan as CSV (q >= 9)
    Schedule {
        #[arg(long)]
        q: u32,
        /// Print the adder-count summary instead of the CSV
        #[arg(long)]
        summary: bool,
    },
    /// Emit the tau vs tau+ delay comparison table as CSV
    Perf {
        /// Comma-separated list of q values
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReversePath {
    Functional,
    Eq9,
    Matrix,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Exhaustive,
    Sample,
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn parse_value(text: &str, what: &str) -> Result<BigUint, String> {
    BigUint::from_str(text.trim()).map_err(|_| format!("{what} is not a decimal integer: {text}"))
}

fn residue_vector(
    set: &TauPlusSet,
    x1: &str,
    x2: &str,
    x3: &str,
) -> Result<ResidueVector, String> {
    let x1 = parse_value(x1, "x1")?;
    let x2 = parse_value(x2, "x2")?;
    let x3 = parse_value(x3, "x3")?;
    ResidueVector::new(set, x1, x2, x3).map_err(|e| e.to_string())
}

fn record_from_stdin(set: &TauPlusSet) -> Result<ResidueVector, String> {
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| e.to_string())?;
    let value: serde_json::Value =
        serde_json::from_str(text.trim()).map_err(|e| format!("invalid JSON record: {e}"))?;
    let q = value["q"]
        .as_u64()
        .ok_or_else(|| "record lacks a numeric q".to_string())?;
    if q != u64::from(set.q) {
        return Err(format!("record q = {q} does not match --q {}", set.q));
    }
    let field = |name: &str| -> Result<String, String> {
        value[name]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| format!("record lacks a string field {name}"))
    };
    residue_vector(set, &field("x1")?, &field("x2")?, &field("x3")?)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Info { q } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let record = json!({
                "q": set.q,
                "m1": set.m1.to_string(),
                "m2": set.m2.to_string(),
                "m3": set.m3.to_string(),
                "pair_modulus": set.pair_modulus.to_string(),
                "dynamic_range": set.dr.to_string(),
                "mu1": set.mu1.to_string(),
                "mu2": set.mu2.to_string(),
            });
            println!("{record}");
        }
        Command::Forward { q, x } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let x = parse_value(&x, "x")?;
            let rv = tauplus::forward(&x, &set).map_err(|e| e.to_string())?;
            let record = json!({
                "q": set.q,
                "x1": rv.x1.to_string(),
                "x2": rv.x2.to_string(),
                "x3": rv.x3.to_string(),
            });
            println!("{record}");
        }
        Command::Reverse { q, path, residues } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let rv = match residues.len() {
                0 => record_from_stdin(&set)?,
                3 => residue_vector(&set, &residues[0], &residues[1], &residues[2])?,
                n => return Err(format!("expected 3 residues or none, got {n}")),
            };
            let x = match path {
                ReversePath::Functional => reverse_functional(&rv, &set),
                ReversePath::Eq9 => {
                    x_prime_eq9(&rv, &set).map(|xp| &rv.x1 + &set.m1 * xp)
                }
                ReversePath::Matrix => {
                    let matrix = build_bit_matrix(&set).map_err(|e| e.to_string())?;
                    eval_bit_matrix(&matrix, &rv).map(|xp| &rv.x1 + &set.m1 * xp)
                }
            }
            .map_err(|e| e.to_string())?;
            println!("{x}");
        }
        Command::Verify {
            q,
            mode,
            n,
            seed,
            workers,
        } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let report = match mode {
                VerifyMode::Exhaustive => verify_exhaustive(&set, workers),
                VerifyMode::Sample => verify_sampled(&set, n, seed, workers),
            }
            .map_err(|e| e.to_string())?;
            print!("{}", report.render());
            if !report.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Matrix { q } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let matrix = build_bit_matrix(&set).map_err(|e| e.to_string())?;
            print!("{}", matrix.render());
        }
        Command::Schedule { q, summary } => {
            let set = make_tau_plus(q).map_err(|e| e.to_string())?;
            let matrix = build_bit_matrix(&set).map_err(|e| e.to_string())?;
            let plan = plan_reduction(&matrix).map_err(|e| e.to_string())?;
            if summary {
                print!("{}", fa_count_report(&plan).render());
            } else {
                print!("{}", plan.render_csv());
            }
        }
        Command::Perf { q } => {
            let rows = comparison_table(&q).map_err(|e| e.to_string())?;
            print!("{}", rows_to_csv(&rows));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => usage_error(message),
    }
}
