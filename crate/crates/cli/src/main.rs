mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error(transparent)]
    Core(#[from] riesz_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for invalid configuration, 3 for certification or verification
    /// failure.
    fn exit_code(&self) -> u8 {
        use riesz_core::Error as E;
        match self {
            CliError::Certification(_) => 3,
            CliError::Core(
                E::Certification(_) | E::Solver { .. } | E::Consistency(_) | E::Quadrature { .. },
            ) => 3,
            CliError::Core(E::MissingEntry(_)) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = report::Sink::new(cli.format, cli.out_dir.clone());
    let result = match &cli.command {
        Command::Phi(a) => commands::phi(a, &out),
        Command::Spectrum(a) => commands::spectrum(a, &out),
        Command::Constant(a) => commands::constant(a, &out),
        Command::Verify(a) => commands::verify(a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("riesz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
