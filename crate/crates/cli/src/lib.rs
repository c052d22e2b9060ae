//! Command-line driver: argument parsing, configuration precedence and exit
//! codes. The verbs live in [`commands`].

// `!(x > y)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::{ConfigError, RunConfig};
use crate::output::{Level, Manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "copolymer",
    version,
    about = "Free energy and phase diagram of a random copolymer near a selective interface"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Output root; each verb writes into its own subdirectory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true, value_name = "N", env = "COPOLYMER_THREADS")]
    pub threads: Option<usize>,

    /// Largest step count for exhaustive path counts.
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Entropy tables, finite-width ladder and exact path counts.
    Entropy,
    /// Interface free-energy table at the configured (alpha, beta).
    Interface,
    /// Variational free energy over the configured slope-measure family.
    FreeEnergy,
    /// Phase classification over the (alpha, beta) scan and critical curves.
    PhaseDiagram,
    /// Self-checks of every computational layer against exact oracles.
    OracleCheck,
}

impl Cli {
    /// Defaults, then the file, then flags.
    pub fn resolve(&self) -> Result<(RunConfig, Option<String>), ConfigError> {
        let (mut cfg, sum) = match &self.config {
            Some(path) => {
                let (cfg, bytes) = RunConfig::load(path)?;
                (cfg, Some(output::sha256_hex(&bytes)))
            }
            None => (RunConfig::default(), None),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.validate()?;
        Ok((cfg, sum))
    }
}

pub fn dispatch(command: Command, ctx: &Context) -> anyhow::Result<Manifest> {
    match command {
        Command::Entropy => commands::entropy(ctx),
        Command::Interface => commands::interface(ctx),
        Command::FreeEnergy => commands::free_energy(ctx),
        Command::PhaseDiagram => commands::phase_diagram(ctx),
        Command::OracleCheck => commands::oracle_check(ctx),
    }
}

/// Exit code for a failed run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return EXIT_CONFIG;
        }
        if cause.is::<copolymer_core::Error>() {
            return EXIT_NUMERIC;
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() || cause.is::<serde_json::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_NUMERIC
}

/// Runs a parsed command line, reporting problems on stderr.
pub fn run(cli: &Cli) -> i32 {
    let (config, config_sha256) = match cli.resolve() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("configuration error: --threads must be positive");
            return EXIT_CONFIG;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context { config, config_sha256 };
    match dispatch(cli.command, &ctx) {
        Ok(manifest) => {
            let mut code = EXIT_OK;
            for d in &manifest.diagnostics {
                if d.level > Level::Info {
                    eprintln!("{:?} {}: {}", d.level, d.check, d.message);
                }
                if d.level == Level::Error {
                    code = EXIT_DIAGNOSTIC;
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
