//! Front end for the `waring-core` laboratory.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns
//! the process exit code: 0 when every check passed, 1 when a verification
//! check failed, 2 on usage or resource errors. Records go to the given
//! sink; diagnostics go to standard error.

pub mod args;
mod commands;
pub mod output;
mod report;

use clap::Parser;
use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use args::Cli;
use output::Output;
use waring_core::{Budget, LabError};

/// Result of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(LabError),
    Usage(String),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            // A numerical self-check tripped: that is a failed verification.
            CliError::Core(LabError::Tolerance { .. }) => 1,
            _ => 2,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Shared settings for one invocation.
pub(crate) struct Context {
    pub budget: Budget,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
}

pub fn run<I, T>(argv: I, sink: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let g = &cli.global;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = g.threads {
        if n == 0 {
            eprintln!("waring: --threads must be positive");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("waring: thread pool: {e}");
            return 2;
        }
    };
    let ctx = Context {
        budget: Budget {
            max_cells: g.max_cells,
            max_panels: g.max_panels,
            max_tuples: g.max_tuples,
            max_arcs: g.max_arcs,
        },
        seed: g.seed,
        cache_dir: g.cache_dir.clone(),
    };
    // Records are buffered so the dispatch closure can move into the pool.
    let (result, buf) = pool.install(|| {
        let mut buf = Vec::new();
        let result = commands::dispatch(&cli.command, &ctx, &mut Output::new(g.format, &mut buf));
        (result, buf)
    });
    if let Err(e) = sink.write_all(&buf).and_then(|_| sink.flush()) {
        eprintln!("waring: {e}");
        return 2;
    }
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("waring: {e}");
            e.exit_code()
        }
    }
}
