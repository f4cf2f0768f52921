//! Command-line front end: `run` parses arguments, executes one command and
//! writes a JSON record (default) or CSV rows.
//!
//! Exit codes: 0 on success, 1 on numerical failure (a JSON record with an
//! `error` object is still written), 2 on usage errors.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::args::{Cli, Command, Format};
use crate::error::{CliError, CliResult};
use crate::output::{record, write_json, Report};

pub const THREADS_ENV: &str = "XXZ_GAP_THREADS";

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum(_) => "spectrum",
        Command::Gap(_) => "gap",
        Command::GapScan(_) => "gap-scan",
        Command::SosBound(_) => "sos-bound",
        Command::Curvature(_) => "curvature",
        Command::Boson(_) => "boson",
        Command::Jacobi(_) => "jacobi",
        Command::OptimalDelta(_) => "optimal-delta",
        Command::Figures(_) => "figures",
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

enum Outcome {
    Report(Report),
    Figures(serde_json::Value, serde_json::Value),
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let force = cli.global.force;
    Ok(match &cli.command {
        Command::Spectrum(a) => Outcome::Report(commands::spectrum(a, force)?),
        Command::Gap(a) => Outcome::Report(commands::gap(a, force)?),
        Command::GapScan(a) => Outcome::Report(commands::gap_scan(a, force)?),
        Command::SosBound(a) => Outcome::Report(commands::sos_bound(a, force)?),
        Command::Curvature(a) => Outcome::Report(commands::curvature(a, force)?),
        Command::Boson(a) => Outcome::Report(commands::boson(a, force)?),
        Command::Jacobi(a) => Outcome::Report(commands::jacobi(a)?),
        Command::OptimalDelta(a) => Outcome::Report(commands::optimal_delta(a)?),
        Command::Figures(a) => {
            let dir = cli.global.output.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let params = json!({
                "which": a.which.to_possible_value().map(|v| v.get_name().to_string()),
                "points": a.points,
                "truncation": a.truncation,
                "tol": a.tol,
                "output": dir.display().to_string(),
            });
            Outcome::Figures(params, figures::figures(a, &dir, force)?)
        }
    })
}

fn emit(cli: &Cli, name: &str, outcome: &Outcome, wall: Option<f64>, out: &mut dyn Write) -> CliResult<()> {
    let mut file;
    let sink: &mut dyn Write = match (&cli.command, &cli.global.output) {
        (Command::Figures(_), _) | (_, None) => out,
        (_, Some(path)) => {
            file = BufWriter::new(File::create(path)?);
            &mut file
        }
    };
    match outcome {
        Outcome::Figures(params, files) => {
            let rec = json!({"metadata": record(name, params, wall), "payload": files});
            write_json(sink, &rec)?;
        }
        Outcome::Report(r) => match cli.global.format {
            Format::Csv => r.table.write(sink)?,
            Format::Json => {
                let rec = json!({
                    "metadata": record(name, &r.parameters, wall),
                    "payload": r.payload,
                    "diagnostics": r.diagnostics,
                });
                write_json(sink, &rec)?;
            }
        },
    }
    sink.flush()?;
    Ok(())
}

/// Runs one command; `argv` includes the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let name = command_name(&cli.command);
    let result = thread_count(cli.global.threads).and_then(|n| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
        let start = Instant::now();
        let outcome = pool.install(|| execute(&cli))?;
        let wall = cli.global.timing.then(|| start.elapsed().as_secs_f64());
        emit(&cli, name, &outcome, wall, out)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.exit_code() == 1 {
                let rec = json!({"metadata": record(name, &json!({}), None), "error": e.diagnostic()});
                let _ = write_json(out, &rec);
            }
            e.exit_code()
        }
    }
}
