//! Command-line front end for `qgame-core`.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a claimed
//! equilibrium (or a reproduction check) fails.

pub mod args;
pub mod checks;
pub mod commands;
pub mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command, Format};
use crate::commands::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;

fn dispatch(cli: &Cli) -> qgame_core::Result<(Outcome, Option<String>)> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Analyze(a) => (commands::analyze(a)?, None),
        Command::Correlated(a) => (commands::correlated(a)?, None),
        Command::Ewl(a) => (commands::ewl(a, seed)?, None),
        Command::Verify(a) => (commands::verify(a, seed)?, None),
        Command::PaperCheck(a) => {
            let report = checks::run(checks::Settings {
                seed,
                samples: a.samples,
                grid: a.grid,
            })?;
            let table = render::paper_check_table(&report);
            let outcome = Outcome {
                certification_failed: !report.passed,
                report: serde_json::to_value(&report).expect("reports serialize to JSON"),
            };
            (outcome, Some(table))
        }
    })
}

/// Runs one command line, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok((outcome, custom_table)) => {
            let text = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&outcome.report).expect("JSON text");
                    s.push('\n');
                    s
                }
                Format::Table => custom_table.unwrap_or_else(|| render::table(&outcome.report)),
            };
            let _ = out.write_all(text.as_bytes());
            if outcome.certification_failed {
                let _ = writeln!(err, "certification failed");
                EXIT_UNCERTIFIED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            EXIT_INPUT
        }
    }
}
