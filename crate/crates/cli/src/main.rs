//! Command line for running sweeps, analyzing run records and rendering
//! coverage-precision plots.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdkit::experiment::{self, ExperimentError, SweepConfig};
use qdkit::plot;
use qdkit::report::{self, BootstrapSettings, Parameter};

#[derive(Parser)]
#[command(
    name = "qdkit",
    version,
    about = "Quality-diversity sweeps with Pareto-dominance effect-size analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a parameter sweep and persist one record file per run.
    Run {
        /// Sweep configuration file (TOML).
        #[arg(short = 'c', long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Use a shipped configuration instead of a file.
        #[arg(long, value_parser = ["desk"])]
        preset: Option<String>,
        /// Output directory for run records.
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute pairwise effect-size tables from persisted run records.
    Analyze {
        /// Directory of run records produced by `run`.
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Parameters to analyze (comma separated).
        #[arg(
            short = 'p',
            long,
            value_delimiter = ',',
            default_values = ["sigma", "resolution", "mutation"]
        )]
        parameter: Vec<String>,
        /// Output directory for tables and CSV exports.
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Bootstrap replicates.
        #[arg(long, default_value_t = 10_000)]
        boot: usize,
        /// Confidence level of the intervals.
        #[arg(long, default_value_t = 0.99)]
        level: f64,
        /// Seed for the bootstrap resampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for bootstrap replicates.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Render the coverage-precision plot for one grouping parameter.
    Plot {
        /// Directory of run records produced by `run`.
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Grouping parameter: sigma, resolution or mutation.
        #[arg(short = 'g', long)]
        group_by: String,
        /// Output SVG path.
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Check a sweep configuration file and exit.
    Validate {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
}

enum CliError {
    /// Bad configuration or input; exits with status 2.
    Config(String),
    /// Failure while executing; exits with status 1.
    Runtime(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Config(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(err: ExperimentError) -> Self {
        match err {
            ExperimentError::Config(_)
            | ExperimentError::Parse(_)
            | ExperimentError::NoRecords(_) => CliError::Config(err.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<report::ReportError> for CliError {
    fn from(err: report::ReportError) -> Self {
        match err {
            report::ReportError::TooFewValues(_) => CliError::Config(err.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            preset,
            output,
            jobs,
            seed,
        } => run(config.as_deref(), preset.as_deref(), &output, jobs, seed),
        Command::Analyze {
            input,
            parameter,
            output,
            boot,
            level,
            seed,
            jobs,
        } => analyze(&input, &parameter, &output, boot, level, seed, jobs),
        Command::Plot {
            input,
            group_by,
            output,
        } => render_plot(&input, &group_by, &output),
        Command::Validate { config } => {
            SweepConfig::load(&config)?;
            println!("{} is valid", config.display());
            Ok(())
        }
    }
}

fn load_config(
    config: Option<&Path>,
    preset: Option<&str>,
    seed: Option<u64>,
) -> Result<SweepConfig, CliError> {
    let mut loaded = match (config, preset) {
        (Some(path), None) => SweepConfig::load(path)?,
        (None, Some("desk")) => experiment::desk_preset(),
        (None, Some(other)) => return Err(CliError::Config(format!("unknown preset {other:?}"))),
        (None, None) => {
            return Err(CliError::Config(
                "either --config or --preset is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if let Some(seed) = seed {
        loaded.master_seed = seed;
    }
    Ok(loaded)
}

fn run(
    config: Option<&Path>,
    preset: Option<&str>,
    output: &Path,
    jobs: Option<usize>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let config = load_config(config, preset, seed)?;
    let jobs =
        jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = experiment::execute(&config, output, jobs)?;
    println!(
        "executed {} runs ({} already present) into {}",
        report.executed,
        report.skipped_existing,
        output.display()
    );
    Ok(())
}

fn parse_parameters(names: &[String]) -> Result<Vec<Parameter>, CliError> {
    names
        .iter()
        .map(|name| {
            Parameter::parse(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown parameter {name:?}; expected sigma, resolution or mutation"
                ))
            })
        })
        .collect()
}

fn bound_workers(jobs: Option<usize>) {
    if let Some(jobs) = jobs {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

fn analyze(
    input: &Path,
    parameter_names: &[String],
    output: &Path,
    boot: usize,
    level: f64,
    seed: u64,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    if boot == 0 {
        return Err(CliError::Config("--boot must be at least 1".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Config(
            "--level must lie strictly between 0 and 1".into(),
        ));
    }
    let parameters = parse_parameters(parameter_names)?;
    bound_workers(jobs);
    let loaded = experiment::load_records(input)?;
    for (path, reason) in &loaded.warnings {
        eprintln!("warning: skipped {}: {reason}", path.display());
    }
    let settings = BootstrapSettings {
        n_boot: boot,
        level,
        seed,
    };
    let mut tables = Vec::new();
    for parameter in parameters {
        tables.push(report::pairwise_table(&loaded.records, parameter, settings)?);
    }
    std::fs::create_dir_all(output)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", output.display())))?;
    let written = report::emit_tables(&tables, output)?;
    let finals = output.join("finals.csv");
    report::export_finals(&loaded.records, &finals)?;
    for path in written.iter().chain(std::iter::once(&finals)) {
        println!("wrote {}", path.display());
    }
    for table in &tables {
        println!("{} order: {}", table.parameter.name(), table.order);
    }
    Ok(())
}

fn render_plot(input: &Path, group_by: &str, output: &Path) -> Result<(), CliError> {
    let parameter = Parameter::parse(group_by).ok_or_else(|| {
        CliError::Config(format!(
            "unknown group-by {group_by:?}; expected sigma, resolution or mutation"
        ))
    })?;
    let loaded = experiment::load_records(input)?;
    for (path, reason) in &loaded.warnings {
        eprintln!("warning: skipped {}: {reason}", path.display());
    }
    let scene = plot::build_scene(&loaded.records, parameter)?;
    plot::emit_plot(&scene, output)?;
    println!("wrote {}", output.display());
    Ok(())
}
