use std::process::ExitCode;

use clap::Parser;
use maskkit::cli::{Cli, Command};
use maskkit::commands::{self, Outcome};
use maskkit::error::CliError;

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| CliError::Write {
                    path: "-".into(),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (outcome, output): (Outcome, _) = match cli.command {
        Command::Gram { input, output } => (commands::gram(&input)?, output),
        Command::Certify { input, certify, output } => {
            (commands::certify(&input, &certify.options())?, output)
        }
        Command::Mask {
            input,
            certify,
            d_b,
            completion_seed,
            output,
        } => (
            commands::mask(&input, &certify.options(), d_b, completion_seed)?,
            output,
        ),
        Command::Verify {
            states,
            masker,
            tol,
            output,
        } => (commands::verify(&states, &masker, tol)?, output),
        Command::Combine {
            input,
            mu,
            tol,
            search,
            output,
        } => (
            commands::combine(&input, &mu, tol, &search.options(maskkit_core::DEFAULT_FLATNESS_TOL))?,
            output,
        ),
        Command::Sample {
            certificate,
            count,
            seed,
            states,
            tol,
            output,
        } => (
            commands::sample(&certificate, count, seed, states.as_deref(), tol)?,
            output,
        ),
        Command::QubitDemo { seed, tol, output } => (commands::qubit_demo(seed, tol)?, output),
    };
    write_output(output.output.as_deref(), &outcome.json)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MASKKIT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
