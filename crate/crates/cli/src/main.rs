use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use single_ur_cli::commands::{self, CheckArgs, LemmaScanArgs, SampleArgs, SweepArgs, WitnessArgs};
use single_ur_cli::{CliError, Outcome, EXIT_OK, EXIT_USAGE};

/// Verify and explore single-observable uncertainty bounds.
#[derive(Debug, Parser)]
#[command(name = "single-ur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report every bound for each observable of an instance file.
    Check(CheckArgs),
    /// Write the purity curves of the averaged product bounds as CSV.
    Sweep(SweepArgs),
    /// Run the bound and product inequalities on a random ensemble.
    Sample(SampleArgs),
    /// Build and certify the observable that saturates the bound.
    Witness(WitnessArgs),
    /// Brute-force the scalar maximum of (x^s − y^s)²/(x + y) on [m, M]².
    LemmaScan(LemmaScanArgs),
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check(args) => commands::check(args, out),
        Command::Sweep(args) => commands::sweep(args, out),
        Command::Sample(args) => commands::sample(args, out),
        Command::Witness(args) => commands::witness(args, out),
        Command::LemmaScan(args) => commands::lemma_scan_cmd(args, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(&cli, &mut out) {
        Ok(outcome) => outcome.exit_code(),
        Err(err) => {
            let _ = out.flush();
            eprintln!("single-ur: {err}");
            err.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
