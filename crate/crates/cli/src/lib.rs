//! Driver for the `gevrey` command line tool: config loading, the
//! subcommands, and the numbered acceptance checks.

pub mod commands;
pub mod config;
pub mod error;
pub mod oracles;
pub mod output;
pub mod samples;
pub mod verify;

use std::path::{Path, PathBuf};

use config::{RunConfig, Subcommand};
pub use error::CliError;

/// What a subcommand produced. `pass` is the subcommand's own check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    /// 0 when the check passed, 1 when it failed. Errors map to 2.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Runs `sub` with `cfg`, writing artifacts and `manifest.json` into `out`.
pub fn run(sub: Subcommand, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut resolved = cfg.clone();
    resolved.subcommand = Some(sub);
    let mut outcome = match sub {
        Subcommand::Assoc => commands::assoc::run(&resolved, out)?,
        Subcommand::Seqcheck => commands::seqcheck::run(&resolved, out)?,
        Subcommand::Bump => commands::bump::run(&resolved, out)?,
        Subcommand::Bv => commands::bv::run(&resolved, out)?,
        Subcommand::Wf => commands::wf::run(&resolved, out)?,
        Subcommand::Verify => verify::run(&resolved, out)?,
    };
    outcome
        .artifacts
        .push(output::write_atomic(out, "manifest.json", &resolved.to_json())?);
    Ok(outcome)
}
