mod args;
mod commands;
mod failure;
mod source;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::{Failure, Kind};

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Approximate(a) => commands::approximate(a),
        Command::Build(a) => commands::build(a),
        Command::Homology(a) => commands::homology(a),
        Command::Persist(a) => commands::persist(a),
        Command::Verify(a) => commands::verify(a),
        Command::Corpus(a) => commands::corpus(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let failure = Failure::new(Kind::Usage, first.trim_start_matches("error: "));
            eprintln!("{}", failure.to_json());
            return ExitCode::from(failure.kind.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.kind.exit_code() as u8)
        }
    }
}
