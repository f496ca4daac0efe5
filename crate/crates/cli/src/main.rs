//! `gm4`: command-line front end for `.gm` graph-manifold manifests.
//!
//! Exit status: 0 success or `Yes`, 1 `No`, 2 `Inconclusive`, 3 parse or
//! validation failure, 4 any other failure, 64 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gm4::assembly::{invariant_report, isomorphic_reduced, reduce, Comparison, GraphStructure};
use gm4::gl2z::{classify_with_conjugator, Mat2};
use gm4::manifest::{self, Manifest};
use gm4::meyer::psi;

const EXIT_NO: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_FAILURE: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "gm4",
    version,
    about = "Reduce, describe and compare 4-dimensional graph-manifolds"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a manifest.
    Validate { file: PathBuf },
    /// Print the invariant report of a manifest.
    Invariants { file: PathBuf },
    /// Contract fiber-preserving edges and print the reduced manifest.
    Reduce { file: PathBuf },
    /// Compare two reduced manifests.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Coefficient radius of the fiber-matrix search.
        #[arg(long, default_value_t = 3)]
        search_bound: u32,
    },
    /// Conjugacy class of a matrix `[[a,b],[c,d]]`.
    Matclass { matrix: String },
    /// Meyer function Ψ of a matrix `[[a,b],[c,d]]` in SL(2,Z).
    Psi { matrix: String },
}

/// Diagnostic plus exit status.
struct Failure(u8, String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Format::Text = cli.format;
    match run(cli.command) {
        Ok((report, code)) => {
            print!("{report}");
            ExitCode::from(code)
        }
        Err(Failure(code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(String, u8), Failure> {
    match command {
        Command::Validate { file } => {
            let gs = load(&file)?;
            Ok((
                format!(
                    "valid: {} block(s), {} edge(s)\n",
                    gs.blocks.len(),
                    gs.edges.len()
                ),
                0,
            ))
        }
        Command::Invariants { file } => Ok((invariant_report(&load(&file)?).to_string(), 0)),
        Command::Reduce { file } => {
            let gs = load(&file)?;
            let reduced = reduce(&gs)
                .map_err(|e| Failure(EXIT_FAILURE, format!("{}: {e}", file.display())))?;
            Ok((manifest::serialize(&Manifest::from_structure(&reduced)), 0))
        }
        Command::Compare { a, b, search_bound } => {
            let (ga, gb) = (load(&a)?, load(&b)?);
            let outcome = isomorphic_reduced(&ga, &gb, search_bound)
                .map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
            Ok(match outcome {
                Comparison::Yes(w) => (format!("Yes\n{w}\n"), 0),
                Comparison::No(field) => (format!("No\nseparated by: {field}\n"), EXIT_NO),
                Comparison::Inconclusive => (
                    format!("Inconclusive\nno matching found within search bound {search_bound}\n"),
                    EXIT_INCONCLUSIVE,
                ),
            })
        }
        Command::Matclass { matrix } => {
            let m = matrix_arg(&matrix)?;
            let (class, p) =
                classify_with_conjugator(&m).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            Ok((
                format!(
                    "class: {class}\nrepresentative: {}\nconjugator: {p}\n",
                    class.representative()
                ),
                0,
            ))
        }
        Command::Psi { matrix } => {
            let m = matrix_arg(&matrix)?;
            let value = psi(&m).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            let text = if value.is_integer() {
                value.numer().to_string()
            } else {
                value.to_string()
            };
            Ok((format!("{text}\n"), 0))
        }
    }
}

fn load(path: &Path) -> Result<GraphStructure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    manifest::load(&text).map_err(|errors| {
        let lines: Vec<String> = errors
            .iter()
            .map(|e| format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))
            .collect();
        Failure(EXIT_INVALID, lines.join("\n"))
    })
}

fn matrix_arg(text: &str) -> Result<Mat2, Failure> {
    text.parse()
        .map_err(|e| Failure(EXIT_INVALID, format!("invalid matrix: {e}")))
}
