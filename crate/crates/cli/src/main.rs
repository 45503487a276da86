use std::process::ExitCode;

use caratheodory_cli::{configure_threads, execute, Cli, Outcome};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(Outcome::Error.exit_code() as u8);
    }
    let run = execute(&cli);
    let json = match serde_json::to_string_pretty(&run.report) {
        Ok(s) => s + "\n",
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return ExitCode::from(Outcome::Error.exit_code() as u8);
        }
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(Outcome::Error.exit_code() as u8);
        }
    }
    if cli.json {
        print!("{json}");
    } else {
        print!("{}", run.summary);
    }
    ExitCode::from(run.report.outcome.exit_code() as u8)
}
