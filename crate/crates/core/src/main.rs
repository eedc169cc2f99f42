use std::path::PathBuf;
use std::process::ExitCode;

use channel_spectra::cli::{exit_code, run, Command, RunConfig};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Bands,
    Gaps,
    SweepOmega,
    Hill,
    Classical,
    Mourre,
    Commutator,
    Diagnostics,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Bands => Command::Bands,
            Cmd::Gaps => Command::Gaps,
            Cmd::SweepOmega => Command::SweepOmega,
            Cmd::Hill => Command::Hill,
            Cmd::Classical => Command::Classical,
            Cmd::Mourre => Command::Mourre,
            Cmd::Commutator => Command::Commutator,
            Cmd::Diagnostics => Command::Diagnostics,
        }
    }
}

/// Spectra, gaps, drift and transport certificates of a magnetic channel.
#[derive(Debug, Parser)]
#[command(name = "channel-spectra", version)]
struct Args {
    command: Cmd,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set omega=10` or `--set initial.px=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Shorthand for `--set gen_nogo=true`.
    #[arg(long)]
    gen_nogo: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let mut sets = args.set.clone();
    if args.gen_nogo {
        sets.push("gen_nogo=true".into());
    }
    let cfg = match RunConfig::resolve(args.config.as_deref(), &sets) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = args.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(args.command.into(), &cfg, &args.out, args.workers) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
