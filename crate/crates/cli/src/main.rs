mod args;
mod commands;
mod inputs;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use procmat::tolerance::DEFAULT_TOL;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    match commands::run(&cli.command, tol) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if writeln!(stdout, "{}", out.stdout).is_err() {
                return ExitCode::from(EXIT_INPUT);
            }
            if out.negative {
                eprintln!("procmat {}: negative verdict", cli.command.verb());
                ExitCode::from(EXIT_NEGATIVE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("procmat: usage: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("procmat: malformed input: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
