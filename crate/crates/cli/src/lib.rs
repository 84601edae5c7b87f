//! Command-line front end for `evoswitch`: flags and JSON configs in, CSV or
//! JSON out. Floats are printed with 17 significant digits.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric or integration failure
//! (partial output is still written), 4 simulation runs that never absorbed.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};

use serde_json::{Map, Value};

pub use args::Cli;
pub use config::{CommandConfig, Format, Grid, RunConfig};
pub use error::CliError;
pub use output::{Output, Table};

/// Sizes the global rayon pool from `EVOSWITCH_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("EVOSWITCH_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("EVOSWITCH_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(CliError::config("EVOSWITCH_THREADS must be at least 1"));
    }
    // A second call fails harmlessly if a pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Merges the config file and the flags into one run.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut fields = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str(&text)? {
                Value::Object(m) => m,
                _ => return Err(CliError::config("a config must be a JSON object")),
            }
        }
        None => Map::new(),
    };
    let from_file = match fields.remove("command") {
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(CliError::config("\"command\" must be a string")),
        None => None,
    };
    let command = match (&cli.command, from_file) {
        (Some(c), Some(f)) if c.name() != f => {
            return Err(CliError::Config(format!("config is for {f:?} but {:?} was requested", c.name())));
        }
        (Some(c), _) => c.name().to_string(),
        (None, Some(f)) => f,
        (None, None) => return Err(CliError::config("no command given (subcommand or \"command\" in --config)")),
    };
    let (seed, format, out) = config::take_globals(&mut fields)?;
    if let Some(c) = &cli.command {
        c.overlay(&mut fields)?;
    }
    let cfg = RunConfig {
        command: CommandConfig::from_fields(&command, fields)?,
        seed: cli.seed.or(seed),
        format: cli.format.or(format).unwrap_or_default(),
        out: cli.out.clone().or(out),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = resolve(cli)?;
    if cli.emit_config {
        return output::write_json(&cfg.to_json(), io::stdout().lock());
    }
    let run = commands::execute(&cfg)?;
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    run.output.write(cfg.format, &mut sink)?;
    sink.flush()?;
    if let (Format::Csv, Some(summary)) = (cfg.format, &run.output.summary) {
        output::write_json(summary, io::stderr().lock())?;
    }
    match run.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
