mod args;
mod commands;
mod resolve;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub const FORMAT_VERSION: u32 = 1;

/// Exit 1 for failed checks and computations, 2 for bad input.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Runtime(m) => write!(f, "failed: {m}"),
        }
    }
}

impl From<shellrig::Error> for Failure {
    fn from(e: shellrig::Error) -> Self {
        use shellrig::Error as E;
        match e {
            E::Degenerate(_) | E::DomainExit { .. } | E::InsufficientData { .. } | E::FlatPoint(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut res = resolve::Resolver::load(cli.config.as_deref())?;
    let threads: Option<usize> = res.optional("threads", cli.threads)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    res.forget("threads");
    let verbose = cli.verbose > 0;
    match cli.command {
        Command::Lemmas(a) => commands::lemmas(a, &mut res),
        Command::Sweep(a) => commands::sweep(a, &mut res, verbose),
        Command::Fit(a) => commands::fit(a, &mut res),
        Command::Geodesic(a) => commands::geodesic(a, &mut res),
        Command::Inspect(a) => commands::inspect(a, &mut res),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
