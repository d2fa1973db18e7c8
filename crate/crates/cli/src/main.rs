use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use quadphase_cli::{execute, CliError, Format, RunFlags};

#[derive(Parser)]
#[command(name = "quadphase", version, about = "Light-pulse atom interferometer phases in quadratic potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Evaluate the scan defined in the scenario.
        #[arg(long)]
        scan: bool,
        /// exact | perturbative:<k> | oracle:<h>; overrides the scenario.
        #[arg(long)]
        method: Option<String>,
        /// Halving study against the closed-form series.
        #[arg(long)]
        compare_series: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { scenario, scan, method, compare_series, out, format } = cli.command;
    let format = match format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let flags = RunFlags { scan, compare_series };
    let result = execute(&scenario, method.as_deref(), flags, format).and_then(|(data, summary)| {
        match &out {
            Some(p) => {
                std::fs::write(p, data)?;
                eprint!("{summary}");
            }
            None => {
                std::io::stdout().write_all(data.as_bytes())?;
                if format == Format::Csv {
                    eprint!("{summary}");
                }
            }
        }
        Ok::<_, CliError>(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
