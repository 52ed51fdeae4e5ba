use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use gevrey_cli::config::{RunConfig, Subcommand};
use gevrey_cli::CliError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Associated functions T, T* and their log bounds on a k grid
    Assoc,
    /// Weight sequence conditions and constants
    Seqcheck,
    /// Bump function derivatives and its ultradifferentiable norm
    Bump,
    /// Boundary-value pairing of a tube fixture, Stokes and direct
    Bv,
    /// Wave front detection on sampled data
    Wf,
    /// Numbered acceptance checks
    Verify,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Assoc => Subcommand::Assoc,
            Command::Seqcheck => Subcommand::Seqcheck,
            Command::Bump => Subcommand::Bump,
            Command::Bv => Subcommand::Bv,
            Command::Wf => Subcommand::Wf,
            Command::Verify => Subcommand::Verify,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gevrey", version, about = "Numerics for extended Gevrey classes")]
struct Args {
    command: Command,
    /// JSON run config; missing fields take defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<u8, CliError> {
    if let Some(n) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config {
                field: "--jobs".into(),
                message: e.to_string(),
            })?;
    }
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let sub = Subcommand::from(args.command);
    if let Some(declared) = cfg.subcommand {
        if declared != sub {
            eprintln!("note: config was written for {}, running {}", declared.name(), sub.name());
        }
    }
    let outcome = gevrey_cli::run(sub, &cfg, &args.out)?;
    // a closed pipe on stdout is not an error of the run
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", outcome.summary);
    for a in &outcome.artifacts {
        let _ = writeln!(stdout, "wrote {}", a.display());
    }
    Ok(outcome.exit_code() as u8)
}
