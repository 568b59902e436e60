mod commands;
mod failure;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::failure::Failure;

/// Cell matrices: construction, spectra, reduction, inverse eigenvalue
/// solvers and permutation checks.
///
/// Flag values are inline JSON or a path to a JSON file. Results are written
/// as JSON to standard output (or `--out`); a readable summary goes to
/// standard error.
#[derive(Parser, Debug)]
#[command(name = "cellmat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance for the command's comparisons; defaults to the library default.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build D(x) from a positive vector.
    Construct {
        #[arg(long)]
        vector: String,
    },
    /// Eigenvalues of D(x) or of a symmetric matrix, by Jacobi and, when the
    /// generator is grouped, by reduction.
    Spectrum(SpectrumArgs),
    /// Reduce a grouped D(x) to its core matrix, recording the operations.
    Reduce {
        #[arg(long)]
        vector: String,
    },
    /// Solve the 3x3 problem for a spectrum {l1, l2, l3} with zero sum.
    Solve3 {
        #[arg(long)]
        spectrum: String,
    },
    /// Realize {(n-1) lambda, -lambda, ..., -lambda} by a constant vector.
    SolveUniform {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Two groups: --tails "[l3, l4]" --mult "[l1, l2]".
    #[command(name = "solve-2group")]
    SolveTwoGroup(GroupedArgs),
    /// Any number of groups with the given tail values and multiplicities.
    SolveGrouped(GroupedArgs),
    /// Check that D(x) and D(pi(x)) are similar step by step and share a spectrum.
    VerifyPerm {
        #[arg(long)]
        vector: String,
        #[arg(long)]
        perm: String,
    },
    /// Check whether a spectrum is the one the grouped construction yields.
    VerifyMembership {
        #[arg(long)]
        spectrum: String,
        #[command(flatten)]
        grouped: GroupedArgs,
    },
    /// Compare the closed-form leading principal minors of D(x) with numeric
    /// determinants.
    Detcheck {
        #[arg(long)]
        vector: String,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SpectrumArgs {
    #[arg(long)]
    vector: Option<String>,
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args, Debug)]
struct GroupedArgs {
    #[arg(long)]
    tails: String,
    #[arg(long)]
    mult: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let message = first.strip_prefix("error: ").unwrap_or(first);
            println!("{}", Failure::parse(message.to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            println!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(cellmat::Error::InvalidTolerance(t).into());
        }
    }
    let output = commands::dispatch(&cli.command, cli.tol)?;
    let json = output.json;
    match &cli.out {
        Some(path) => fs::write(path, json).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| Failure::Output(e.to_string()))?,
    }
    eprint!("{}", output.summary);
    Ok(())
}
