//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::catalog::{builtin_metrics, lookup};
use crate::classifier::{aggregate, holonomy_report, identity_report, invariants_report, SamplingConfig};
use crate::dsl::{parse_metric_file, MetricSpec};
use crate::invariants::Tolerances;
use crate::output::{to_json, to_text};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "curvkit", version, about = "Curvature classification of pseudo-Riemannian metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct RunConfig {
    /// Metric file path, or `catalog:<name>`.
    input: String,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Metric jet order K.
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long = "tol-rel", default_value_t = 1e-8)]
    tol_rel: f64,
    #[arg(long = "tol-abs", default_value_t = 1e-10)]
    tol_abs: f64,
    /// Highest k checked for `∇^k R = 0` (needs order ≥ k + 2).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    json: bool,
}

impl RunConfig {
    fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            points: self.points,
            seed: self.seed,
            order: self.order,
            k: self.k,
            tol: Tolerances { rel: self.tol_rel, abs: self.tol_abs },
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full classification report.
    Classify(RunConfig),
    /// Curvature invariants at each sample point.
    Invariants(RunConfig),
    /// Identity residuals at 2-symmetric sample points.
    Identities {
        #[command(flatten)]
        run: RunConfig,
        /// Run at every point, 2-symmetric or not.
        #[arg(long)]
        force: bool,
    },
    /// Infinitesimal holonomy kernels.
    Holonomy(RunConfig),
    /// Built-in metrics.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print an entry in the metric file format.
    Emit {
        name: String,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE };
        Self { code, message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: EXIT_USAGE, message }
}

fn load(input: &str) -> Result<MetricSpec, Failure> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return Ok(lookup(name)?.spec);
    }
    let text = std::fs::read_to_string(input).map_err(|e| usage(format!("cannot read `{input}`: {e}")))?;
    parse_metric_file(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure { message: format!("{input}: {}", f.message), ..f }
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| usage(format!("write failed: {e}")))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Classify(run) => {
            let report = aggregate(&load(&run.input)?, &run.sampling())?;
            emit(out, &if run.json { to_json(&report) } else { to_text(&report, &["points"]) })?;
            Ok(if report.findings_pass() { EXIT_OK } else { EXIT_FINDINGS })
        }
        Command::Invariants(run) => {
            let report = invariants_report(&load(&run.input)?, &run.sampling())?;
            emit(out, &if run.json { to_json(&report) } else { to_text(&report, &[]) })?;
            Ok(EXIT_OK)
        }
        Command::Identities { run, force } => {
            let report = identity_report(&load(&run.input)?, &run.sampling(), force)?;
            emit(out, &if run.json { to_json(&report) } else { to_text(&report, &[]) })?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FINDINGS })
        }
        Command::Holonomy(run) => {
            let report = holonomy_report(&load(&run.input)?, &run.sampling())?;
            emit(out, &if run.json { to_json(&report) } else { to_text(&report, &[]) })?;
            Ok(EXIT_OK)
        }
        Command::Catalog(CatalogCommand::List { json }) => {
            let entries = builtin_metrics();
            if json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|e| serde_json::json!({"name": e.name, "description": e.description, "dim": e.spec.dim()}))
                    .collect();
                emit(out, &to_json(&list))?;
            } else {
                let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
                let text: String = entries.iter().map(|e| format!("{:width$}  {}\n", e.name, e.description)).collect();
                emit(out, &text)?;
            }
            Ok(EXIT_OK)
        }
        Command::Catalog(CatalogCommand::Emit { name, output }) => {
            let text = lookup(&name)?.spec.to_file_string();
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))?,
                None => emit(out, &text)?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
