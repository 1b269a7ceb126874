use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airace::evodyn::AnalyticFixation;
use airace::figures::{panel_data, run_figure};
use airace::mcsim::SimConfig;
use airace::sweep::{self, OutputFormat, SweepSpec};
use airace::validate::{run_validate, ValidateOptions};
use airace::{Error, PointConfig, Result};
use clap::{Parser, Subcommand};

/// Environment variable holding the worker count.
const THREADS_VAR: &str = "AIRACE_THREADS";

#[derive(Parser)]
#[command(
    name = "airace",
    version,
    about = "AI development race: evolutionary dynamics and zone analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate the data behind a figure panel
    Figure {
        /// fig1a, fig1b, fig1c, fig2a, fig2b, fig2c, fig3a, fig3b or fig3c
        id: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate zones, stationary distributions and welfare over a grid
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the output path in the spec; without either, rows go to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulated fixation probabilities against the analytic values
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        /// Also check the stationary distribution with this many mutation events
        #[arg(long)]
        stationary_events: Option<usize>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print everything known about one parameter point as JSON
    Point {
        #[arg(long)]
        params: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Spec(format!(
            "{THREADS_VAR} must be a positive integer, got '{value}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Spec(format!("cannot start worker pool: {e}")))
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Figure { id, out } => {
            for path in run_figure(&id, &out)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Sweep { spec, out } => {
            let spec = SweepSpec::from_json(&read(&spec)?)?;
            match out.or_else(|| spec.output.clone()) {
                Some(path) => {
                    let rows = sweep::execute(&spec, &path)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => {
                    let rows = sweep::run_sweep(&spec)?;
                    let stdout = io::stdout().lock();
                    match spec.format {
                        OutputFormat::Csv => {
                            sweep::write_csv(&rows, stdout).map_err(|source| Error::Io {
                                path: "<stdout>".into(),
                                source,
                            })?
                        }
                        OutputFormat::Json => sweep::write_json(&rows, stdout)?,
                    }
                }
            }
            Ok(true)
        }
        Command::Validate {
            spec,
            runs,
            seed,
            max_steps,
            stationary_events,
            out,
        } => {
            let grid = SweepSpec::from_json(&read(&spec)?)?;
            let mut options = ValidateOptions::new(SimConfig::new(runs, seed, max_steps));
            options.stationary_events = stationary_events;
            let report = run_validate(&options, &grid, &AnalyticFixation)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(&text, out.as_deref())?;
            for p in report.points.iter().filter(|p| !p.pass) {
                eprintln!("FAIL point {}: {:?}", p.index, p.params);
            }
            eprintln!(
                "{} checks passed, {} failed ({} points)",
                report.passed,
                report.failed,
                report.points.len()
            );
            Ok(report.all_pass())
        }
        Command::Point { params } => {
            let point = PointConfig::from_json(&read(&params)?)?;
            let mut text = serde_json::to_string_pretty(&panel_data(None, &point)?)?;
            text.push('\n');
            emit(&text, None)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
