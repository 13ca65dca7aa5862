use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hml_cli::{run_verify, CliError, GridSpec, Report, Suite, VerifyOptions};

/// Numerical verification of Hodge, Weil-Petersson and BCOV metric identities.
#[derive(Parser)]
#[command(name = "hml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a report.
    Verify {
        /// exterior, vhs, metrics, poincare or all
        suite: Suite,
        /// Built-in family name or path to a family config file
        #[arg(long, default_value = "quintic")]
        family: String,
        /// Radial grid, `log:a:b:N` or `lin:a:b:N`
        #[arg(long)]
        grid: Option<GridSpec>,
        /// Number of phases per radius
        #[arg(long)]
        rays: Option<usize>,
        /// Decades in the Poincaré sweep
        #[arg(long)]
        decades: Option<usize>,
        /// Finite-difference step relative to the local scale
        #[arg(long = "fd-step")]
        fd_step: Option<f64>,
        /// Relative tolerance for identities checked by finite differences
        #[arg(long)]
        tol: Option<f64>,
        /// Report path; the other format is written next to it
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn encode(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(report: &Report, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let primary = encode(report, format)?;
    let Some(path) = out else {
        print!("{primary}");
        return Ok(());
    };
    write(path, &primary)?;
    let (mirror, ext) = match format {
        Format::Csv => (Format::Json, "json"),
        Format::Json => (Format::Csv, "csv"),
    };
    let mirror_path = path.with_extension(ext);
    if mirror_path != path {
        write(&mirror_path, &encode(report, mirror)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Verify {
        suite,
        family,
        grid,
        rays,
        decades,
        fd_step,
        tol,
        out,
        format,
    } = cli.command;
    let opts = VerifyOptions {
        suite,
        family,
        grid,
        rays,
        decades,
        fd_step,
        tol,
    };
    let result = run_verify(&opts).and_then(|r| emit(&r, out.as_deref(), format).map(|_| r));
    match result {
        Ok(report) => {
            let rows: usize = report.tables.iter().map(|t| t.rows.len()).sum();
            let verdict = if report.all_pass() { "PASS" } else { "FAIL" };
            eprintln!("{verdict}: {} on {} ({rows} rows)", report.suite, report.family);
            for t in report.tables.iter().filter(|t| !t.all_pass()) {
                eprintln!("  failing rows in table {}", t.name);
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
