//! Command-line front end: `verify` runs the checks of a scenario and writes
//! a JSON report, `chern` prints the Chern forms.

mod report;
mod run;
mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use report::{CheckRecord, Report, RingRecord, Status};
pub use run::{emit_chern, run, RunOptions};
pub use scenario::{load_scenario, parse_scenario, CheckKind, Scenario, SectionSpec};

#[derive(Debug, Parser)]
#[command(
    name = "superkoszul",
    version,
    about = "Exact checks of Koszul and twisted fundamental-class representatives"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks of a scenario and emit a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Suites to run; overrides the scenario's list. Repeatable.
        #[arg(long = "check", value_enum)]
        checks: Vec<CheckKind>,
        /// Where to write the report; stdout when neither this nor the
        /// scenario names a path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the ring's truncation order.
        #[arg(long)]
        truncation: Option<u32>,
        /// Include per-check wall-clock times in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Print det(R) and, with a section, the (r,r) part of tr_s(psi).
    Chern {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        truncation: Option<u32>,
    },
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(command: Command) -> crate::Result<i32> {
    match command {
        Command::Verify {
            config,
            checks,
            report,
            truncation,
            timing,
        } => {
            let mut scenario = load_scenario(&config, truncation)?;
            if !checks.is_empty() {
                let text = std::fs::read_to_string(&config)
                    .map_err(|e| crate::Error::Io(e.to_string()))?;
                scenario = with_checks(&text, truncation, &checks)?;
            }
            let result = run(&scenario, &RunOptions { timing });
            let json = result.to_json();
            match report.or(scenario.report.clone()) {
                Some(path) => {
                    std::fs::write(&path, &json)
                        .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
                    print!("{}", result.summary());
                }
                None => {
                    eprint!("{}", result.summary());
                    let mut out = std::io::stdout().lock();
                    out.write_all(json.as_bytes())
                        .map_err(|e| crate::Error::Io(e.to_string()))?;
                }
            }
            Ok(result.exit_code())
        }
        Command::Chern { config, truncation } => {
            let scenario = load_scenario(&config, truncation)?;
            print!("{}", emit_chern(&scenario)?);
            Ok(0)
        }
    }
}

/// Revalidate a scenario with the check list replaced, so that the
/// holomorphicity rule applies to checks given on the command line too.
fn with_checks(
    text: &str,
    truncation: Option<u32>,
    checks: &[CheckKind],
) -> crate::Result<Scenario> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| crate::Error::schema("", e.to_string()))?;
    let names: Vec<serde_json::Value> = checks.iter().map(|c| c.name().into()).collect();
    if let Some(obj) = value.as_object_mut() {
        obj.insert("checks".into(), names.into());
    }
    parse_scenario(&value.to_string(), truncation)
}
