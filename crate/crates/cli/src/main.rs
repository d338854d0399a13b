//! `altcard`: axiom checks, reconstruction, concavity and smoothness diagnostics
//! for intensity-comparison oracles.
//!
//! Exit codes: 0 pass, 1 a property failed or a witness was found, 2 usage or
//! configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Status;
use crate::config::{config_error, parse_pair, parse_point_pair, AlepSource, ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "altcard", version, about = "Cardinal utility diagnostics for intensity-comparison oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check consistency, crossover, second consistency, continuity (proxy) and monotonicity.
    Verify(RunArgs),
    /// Build the dyadic ladder, write the utility artifact and a value grid.
    Reconstruct(RunArgs),
    /// Midpoint concavity law on the oracle and on the reconstruction.
    Concavity(RunArgs),
    /// Line-smoothness limit on the diagonal and the Debreu proxy.
    Smoothness(RunArgs),
    /// Substitute / complement labels on a grid.
    Alep(RunArgs),
    /// List the built-in fixtures.
    Catalog,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog fixture name.
    #[arg(long)]
    oracle: Option<String>,
    /// JSON expression file defining a utility.
    #[arg(long)]
    expr: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    depth: Option<u32>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    eps_eq: Option<f64>,
    #[arg(long)]
    tol_t: Option<f64>,
    /// Finite-difference step for ALEP.
    #[arg(long)]
    h: Option<f64>,
    /// Diagonal scale for the line-smoothness limit.
    #[arg(long)]
    b: Option<f64>,
    /// Classify strictness of the concavity law.
    #[arg(long)]
    strict: bool,
    /// Reference segment as "x1,..,xn;y1,..,yn".
    #[arg(long, value_parser = parse_point_pair)]
    segment: Option<[Vec<f64>; 2]>,
    /// Anchors y*;x* with values 0 and 1.
    #[arg(long, value_parser = parse_point_pair)]
    anchors: Option<[Vec<f64>; 2]>,
    /// Second anchor pair for the affine-uniqueness check.
    #[arg(long, value_parser = parse_point_pair)]
    second_anchors: Option<[Vec<f64>; 2]>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Coordinate pair "i,j" for ALEP.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    #[arg(long, value_enum)]
    alep_source: Option<AlepSource>,
    #[arg(long)]
    debreu_step: Option<f64>,
    #[arg(long)]
    continuity_delta: Option<f64>,
}

impl RunArgs {
    fn resolve(self) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if self.oracle.is_some() || self.expr.is_some() {
            c.oracle = self.oracle;
            c.expr = self.expr;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $(if self.$f.is_some() { c.$f = self.$f; })* };
        }
        set!(seed, trials, depth, out, tol_t, h, b, grid, pair, debreu_step, continuity_delta);
        set_opt!(workers, eps_eq, segment, anchors, second_anchors, alep_source);
        c.strict |= self.strict;
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let (args, cmd): (RunArgs, fn(&RunConfig) -> anyhow::Result<Status>) = match cli.command {
        Command::Catalog => return commands::catalog_cmd(),
        Command::Verify(a) => (a, commands::verify),
        Command::Reconstruct(a) => (a, commands::reconstruct_cmd),
        Command::Concavity(a) => (a, commands::concavity),
        Command::Smoothness(a) => (a, commands::smoothness),
        Command::Alep(a) => (a, commands::alep),
    };
    let cfg = args.resolve()?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_error(format!("cannot start {n} workers: {e}")))?;
    }
    cmd(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("configuration error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
