use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use orbitlab_cli::run::{error_report, run, Cli, CliError, Outcome, RunConfig};

fn emit(out: Option<&PathBuf>, outcome: &Outcome) -> ExitCode {
    let written = match out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("orbitlab: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = error_report(None, &CliError::new("usage", e.to_string()));
            return emit(None, &Outcome { exit_code: 1, body });
        }
    };
    let out = cli.out.clone();
    let command = cli.command;
    let outcome = match RunConfig::from_cli(cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => Outcome { exit_code: 1, body: error_report(Some(command), &e) },
    };
    emit(out.as_ref(), &outcome)
}
