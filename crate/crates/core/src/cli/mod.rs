//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a config or input error, 2 on a
//! numerical failure or a failed cross-check.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::Error;
use crate::thermo::Engine;
use config::{Format, Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineFlag {
    Matsubara,
    Realaxis,
}

impl From<EngineFlag> for Engine {
    fn from(e: EngineFlag) -> Self {
        match e {
            EngineFlag::Matsubara => Engine::Matsubara,
            EngineFlag::Realaxis => Engine::RealAxis,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lifshitz", version, about = "Casimir-Lifshitz free energy and entropy between parallel plates")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file (default: output.path from the config, else stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineFlag>,
    /// Print the resolved config and the summary to stderr.
    #[arg(long)]
    pub verbose: bool,
}

/// Worker count from LIFSHITZ_THREADS (0 or unset: rayon's default).
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LIFSHITZ_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("LIFSHITZ_THREADS must be a non-negative integer, got {raw:?}"))?;
    if n > 0 {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    let inner = match e {
        Error::AtTemperature { source, .. } => source.as_ref(),
        other => other,
    };
    if inner.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Run the CLI and return the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_CONFIG;
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return EXIT_CONFIG;
        }
    };
    let overrides = Overrides {
        out: cli.out,
        format: cli.format,
        engine: cli.engine.map(Engine::from),
    };
    let cfg = match RunConfig::parse(&text).and_then(|c| c.resolve(&overrides)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if cli.verbose {
        eprint!("{}", output::header(&cfg));
    }
    let report = match run::execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let artifact = output::render(&cfg, &report.table);
    match &cfg.output.path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, artifact) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
            for line in &report.summary {
                println!("{line}");
            }
        }
        None => {
            print!("{artifact}");
            if cli.verbose {
                for line in &report.summary {
                    eprintln!("{line}");
                }
            }
        }
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}
