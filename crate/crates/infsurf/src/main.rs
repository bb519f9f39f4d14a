use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infsurf::experiments::{list_experiments, run_experiment, ExperimentSpec};
use infsurf::CliError;

#[derive(Parser)]
#[command(name = "repro", version, about = "Run length-spectrum experiments and write reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List experiments with their statements.
    List,
    /// Run one experiment.
    #[command(external_subcommand)]
    Run(Vec<String>),
}

#[derive(Parser)]
#[command(name = "repro <experiment-id>", no_binary_name = true)]
struct RunArgs {
    id: String,
    /// Override a parameter, `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Report path (TOML).
    #[arg(long)]
    out: PathBuf,
    /// Table path; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    precision: Option<f64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let mut spec = ExperimentSpec::new(&args.id);
    spec.precision = args.precision;
    spec.jobs = args.jobs;
    for p in &args.params {
        let (k, v) = p.split_once('=').ok_or_else(|| CliError::BadParams(format!("`{p}` is not key=value")))?;
        spec.params.insert(k.trim().to_string(), v.trim().to_string());
    }
    let report = run_experiment(&spec)?;
    let csv = args.csv.unwrap_or_else(|| args.out.with_extension("csv"));
    report.write(&args.out, &csv)?;
    for v in &report.verdicts {
        println!("{} {}{}", if v.pass { "PASS" } else { "FAIL" }, v.name, if v.detail.is_empty() { String::new() } else { format!(" ({})", v.detail) });
    }
    println!("{}: {:.2}s, report {}", report.experiment, report.wall_time_s, args.out.display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (id, anchor) in list_experiments() {
                println!("{id:<24} {anchor}");
            }
            ExitCode::SUCCESS
        }
        Command::Run(raw) => {
            let args = match RunArgs::try_parse_from(raw) {
                Ok(a) => a,
                Err(e) => e.exit(),
            };
            match run(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error[{}]: {e}", e.code());
                    ExitCode::from(2)
                }
            }
        }
    }
}
