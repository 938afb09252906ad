use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use timeop::experiment::{emit_report, run_experiment, ConfigEntries, ConfigError, Experiment, Format};

const EXIT_CRITERION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "timeop", version, about = "Run time-operator experiments and write CSV/JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        /// Experiment name; overrides `experiment` in the config file.
        #[arg(long)]
        experiment: Option<String>,
        /// Flat key=value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config entry, e.g. `--set grid.n=1024`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        format: Option<Format>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time in the report (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// List the available experiments.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<26}{}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { experiment, config, overrides, format, out, timing } => {
            run(experiment, config, overrides, format, out, timing)
        }
    }
}

fn load(
    experiment: Option<String>,
    config: Option<PathBuf>,
    overrides: &[String],
) -> Result<timeop::experiment::ExperimentConfig, String> {
    let source = match &config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?,
        None => String::new(),
    };
    let with_path = |e: ConfigError| match &config {
        Some(path) => format!("{}: {e}", path.display()),
        None => e.to_string(),
    };
    let mut entries = ConfigEntries::parse(&source).map_err(with_path)?;
    if let Some(name) = experiment {
        entries.set(&format!("experiment={name}")).map_err(|e| e.to_string())?;
    }
    for assignment in overrides {
        entries.set(assignment).map_err(|e| e.to_string())?;
    }
    entries.build().map_err(|e| e.to_string())
}

fn run(
    experiment: Option<String>,
    config: Option<PathBuf>,
    overrides: Vec<String>,
    format: Option<Format>,
    out: Option<PathBuf>,
    timing: bool,
) -> ExitCode {
    let cfg = match load(experiment, config, &overrides) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let start = Instant::now();
    let mut report = match run_experiment(&cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    if let Err(e) = emit_report(&report, format.unwrap_or(cfg.format), out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    if let Some(msg) = &report.error {
        eprintln!("error: {}: {msg}", report.experiment);
        return ExitCode::from(EXIT_RUNTIME);
    }
    if !report.pass {
        let failed = report.criteria.iter().filter(|c| !c.pass).count();
        eprintln!("{}: {failed} of {} criteria failed", report.experiment, report.criteria.len());
        return ExitCode::from(EXIT_CRITERION);
    }
    ExitCode::SUCCESS
}
