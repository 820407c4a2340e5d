use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use stableflow::decompose::ComponentLabel;
use stableflow_cli::{run, CliError, Command, Options, EXIT_CONFIG};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Classify,
    Decompose,
    Simulate,
    Verify,
}

#[derive(Parser)]
#[command(name = "stableflow", version, about = "Classify, decompose, simulate and verify stationary SaS kernels")]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Job file (TOML, or JSON with a .json extension).
    #[arg(long)]
    job: PathBuf,
    /// Report (JSON) or paths (CSV) destination.
    #[arg(long)]
    out: PathBuf,
    /// Label given to atoms the detectors cannot decide.
    #[arg(long, value_name = "LABEL")]
    override_undecided: Option<String>,
    /// Probe file replacing the job's probes.
    #[arg(long)]
    probes: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn execute(args: Args) -> Result<String, CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    let override_undecided = match args.override_undecided {
        Some(s) => Some(s.parse::<ComponentLabel>().map_err(|e| CliError::new(EXIT_CONFIG, format!("--override-undecided: {e}")))?),
        None => None,
    };
    let command = match args.command {
        Cmd::Classify => Command::Classify,
        Cmd::Decompose => Command::Decompose,
        Cmd::Simulate => Command::Simulate,
        Cmd::Verify => Command::Verify,
    };
    run(command, &args.job, &args.out, &Options { override_undecided, probes: args.probes })
}
