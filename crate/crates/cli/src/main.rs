mod args;
mod commands;
mod csv;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use padfs_core::Error;

use crate::args::{Cli, Command};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv = match args::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = Cli::parse_from(argv);
    let (result, out) = match &cli.command {
        Command::Measures(a) => (commands::measures(a), &a.common.out),
        Command::Wigner(a) => (commands::wigner(a), &a.common.out),
        Command::Inversion(a) => (commands::inversion(a), &a.common.out),
        Command::Parametric(a) => (commands::parametric(a), &a.common.out),
        Command::Decay(a) => (commands::decay(a), &a.common.out),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = outcome.table.render();
    let written = match out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_IO);
    }
    if !outcome.converged {
        eprintln!("warning: some quadratures did not reach the requested tolerance");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::SUCCESS
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::UnphysicalCovariance { .. } | Error::NoInitialNegativity | Error::ThresholdNotBracketed { .. }) => {
            EXIT_NUMERICAL
        }
        Some(_) => EXIT_USAGE,
        None if e.downcast_ref::<std::io::Error>().is_some() => EXIT_IO,
        None => EXIT_USAGE,
    }
}
