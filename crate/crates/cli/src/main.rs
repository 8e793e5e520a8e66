//! `lfpp`: runs LFPP experiments from a TOML config and writes CSVs plus a
//! run manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfpp_core::Stencil;

use crate::commands::Command;
use crate::config::Config;
use crate::error::{CliError, ConfigError};

#[derive(Parser)]
#[command(
    name = "lfpp",
    version,
    about = "Liouville first passage percolation experiments"
)]
struct Cli {
    /// Worker threads for replica-parallel commands.
    #[arg(long, global = true, env = "LFPP_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML configuration; omitted keys take their defaults.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid cells per side.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Comma-separated mollification scales.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    stencil: Option<Stencil>,
    #[arg(long)]
    memory_cap_gib: Option<f64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Sample a field and its mollification; binary dumps.
    FieldSample(RunArgs),
    /// Distances from the source point over the window.
    Dist(RunArgs),
    /// Filled metric ball at the hitting radius of a Euclidean circle.
    Ball(RunArgs),
    /// Tree geodesic from the source to the target point.
    Geodesic(RunArgs),
    /// Ancestor counts across metric annuli.
    Confluence(RunArgs),
    /// Unit-square crossing distances at every eps.
    Crossings(RunArgs),
    /// Log-log fit of crossing medians against eps.
    Fit(RunArgs),
    /// Distance ratios between two metrics on sampled pairs.
    Bilip(RunArgs),
    /// Normalised distances at two scales.
    Tightness(RunArgs),
    /// Vertical/horizontal crossing ratio of the stretched metric.
    Rotation(RunArgs),
    /// Local log-log slopes of distance against separation.
    Holder(RunArgs),
    /// Area-measure masses of query regions.
    Gmc(RunArgs),
    /// Measure of filled balls against metric radius.
    Dim(RunArgs),
    /// Exact axiom and identity checks.
    AxiomsAll(RunArgs),
    /// Rerun a manifest and compare output digests.
    Replay {
        manifest: PathBuf,
        /// Defaults to `replay/` next to the manifest.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

impl RunArgs {
    fn resolve(&self) -> Result<Config, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.n {
            cfg.grid.n = v;
        }
        if let Some(v) = self.gamma {
            cfg.params.gamma = v;
        }
        if let Some(v) = self.replicas {
            cfg.run.replicas = v;
        }
        if let Some(v) = &self.eps {
            cfg.run.eps = v.clone();
        }
        if let Some(v) = self.stencil {
            cfg.metric.stencil = v;
        }
        if let Some(v) = self.memory_cap_gib {
            cfg.run.memory_cap_gib = v;
        }
        Ok(cfg)
    }
}

fn split(sub: Sub) -> Result<(Command, RunArgs), (PathBuf, Option<PathBuf>)> {
    let pair = |c, a| Ok((c, a));
    match sub {
        Sub::FieldSample(a) => pair(Command::FieldSample, a),
        Sub::Dist(a) => pair(Command::Dist, a),
        Sub::Ball(a) => pair(Command::Ball, a),
        Sub::Geodesic(a) => pair(Command::Geodesic, a),
        Sub::Confluence(a) => pair(Command::Confluence, a),
        Sub::Crossings(a) => pair(Command::Crossings, a),
        Sub::Fit(a) => pair(Command::Fit, a),
        Sub::Bilip(a) => pair(Command::Bilip, a),
        Sub::Tightness(a) => pair(Command::Tightness, a),
        Sub::Rotation(a) => pair(Command::Rotation, a),
        Sub::Holder(a) => pair(Command::Holder, a),
        Sub::Gmc(a) => pair(Command::Gmc, a),
        Sub::Dim(a) => pair(Command::Dim, a),
        Sub::AxiomsAll(a) => pair(Command::AxiomsAll, a),
        Sub::Replay { manifest, out } => Err((manifest, out)),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Resource(format!("worker pool: {e}")))?;
    }
    let manifest = match split(cli.command) {
        Ok((cmd, args)) => {
            let cfg = args.resolve()?;
            commands::run(cmd, &cfg, &args.out)?
        }
        Err((path, out)) => {
            let out = out.unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).join("replay"));
            let m = commands::replay(&path, &out)?;
            println!("replay: {} outputs match", m.outputs.len());
            m
        }
    };
    for o in &manifest.outputs {
        println!("{}  {}", o.sha256, o.file);
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lfpp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
