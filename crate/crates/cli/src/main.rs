mod args;
mod commands;
mod csv;
mod error;
mod svg;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Config};
use error::CliError;

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Transform(a) => commands::transform(a, cfg, out),
        Command::Invert(a) => commands::invert(a, cfg, out),
        Command::Terminal(a) => commands::terminal(a, cfg, out),
        Command::Design(a) => commands::design(a, cfg, out),
        Command::Convolve(a) => commands::convolve(a, cfg, out),
        Command::Verify(a) => commands::verify(a, cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
