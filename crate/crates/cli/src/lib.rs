//! Command-line front end for the `qchan` library.
//!
//! Reports go to stdout (or `--out`) as CSV or JSON; diagnostics go to
//! stderr. Failures map to exit codes through [`CliError::exit_code`].

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::time::Instant;

pub use args::Cli;
pub use error::CliError;

use args::{Command, Format};
use config::FileConfig;
use output::Sink;

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    match threads {
        None => Ok(()),
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(n) => {
            // a pool set up by an earlier run in the same process stays in place
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    configure_threads(cli.common.threads.or(file.threads))?;

    let tabular = matches!(
        cli.command,
        Command::Capacity(_) | Command::Curve(_) | Command::ChiCurves(_) | Command::Ellipse(_)
    );
    let default_format = match cli.command {
        Command::Curve(_) | Command::ChiCurves(_) | Command::Ellipse(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.common.format.or(file.format).unwrap_or(default_format);
    if format == Format::Csv && !tabular {
        return Err(CliError::Invalid("this command only emits JSON".into()));
    }

    let out = cli.common.out.clone().or_else(|| file.out.clone());
    let sink = Sink::open(out.as_deref())?;
    let started = Instant::now();
    let common = &cli.common;
    let emitted = match &cli.command {
        Command::Capacity(a) => commands::capacity(common, a, &file),
        Command::Curve(a) => commands::curve(common, a, &file),
        Command::ChiCurves(a) => commands::chi_curves(common, a, &file),
        Command::Ellipse(a) => commands::ellipse(common, a, &file),
        Command::Minimax(a) => commands::minimax(common, a, &file),
        Command::Certify(a) => commands::certify(common, a, &file),
    };
    let emitted = match emitted {
        Ok(e) => e,
        Err(err) => {
            sink.discard();
            return Err(err);
        }
    };
    let bytes = match (format, &emitted.table) {
        (Format::Csv, Some(table)) => table.to_csv(),
        _ => emitted.report.to_json(started.elapsed().as_secs_f64()),
    };
    sink.write(&bytes)?;
    emitted.verdict
}
