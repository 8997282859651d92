use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use resonance_cli::{list_scenarios, parse_tolerance, run, CliError};

#[derive(Parser)]
#[command(name = "resonance", version, about = "Run decay and decoherence scenarios from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write series.csv and report.json.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance override, repeatable.
        #[arg(long = "tol", value_name = "KEY=VAL", value_parser = parse_tolerance)]
        tol: Vec<(String, f64)>,
    },
    /// Print the scenario catalog.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, tol } => match run(&config, out.as_deref(), &tol) {
            Ok(summary) => {
                if let Some(checks) = summary.report.get("checks").and_then(|c| c.as_array()) {
                    for c in checks {
                        let verdict = if c["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
                        println!("{verdict} {} = {} (tol {})", c["key"].as_str().unwrap_or("?"), c["value"], c["tolerance"]);
                    }
                }
                println!("wrote {}", summary.out_dir.display());
                if summary.passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(e) => report_error(e),
        },
    }
}

fn report_error(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}
