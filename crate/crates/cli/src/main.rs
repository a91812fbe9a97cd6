//! `dtc4`: config-driven runs of the time-crystal studies, emitting CSV artifacts.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::output::RunDir;

#[derive(Parser, Debug)]
#[command(name = "dtc4", version, about = "Period-quadrupling time-crystal studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long, env = "DTC4_WORKERS")]
    workers: Option<usize>,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stroboscopic magnetization and its power spectrum.
    Evolve(Common),
    /// Subharmonic-peak map over (JT, hT); resumable.
    PhaseDiagram(Common),
    /// Quasienergies, quadruplets, chi_zz, s_pi/2 and finite-size scaling.
    Floquet(Common),
    /// Fixed-depth circuits for U^k |up...up>.
    Recompile(Common),
    /// Noisy Trotter threshold study and recompiled-vs-Trotter comparison.
    Noisy(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Evolve(c) => ("evolve", c),
            Command::PhaseDiagram(c) => ("phase-diagram", c),
            Command::Floquet(c) => ("floquet", c),
            Command::Recompile(c) => ("recompile", c),
            Command::Noisy(c) => ("noisy", c),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, common) = cli.command.parts();
    if let Some(n) = common.workers {
        anyhow::ensure!(n > 0, "--workers must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let (mut cfg, text) = config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    cfg.command = Some(cfg.command.clone().unwrap_or_else(|| name.to_string()));
    cfg.validate_for(name)?;
    let config_dir = common
        .config
        .parent()
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let out = match &cfg.out {
        Some(o) if common.out.is_some() => o.clone(),
        Some(o) => config::resolve(&config_dir, o),
        None => PathBuf::from("runs").join(name),
    };
    let mut dir = RunDir::create(&out)?;
    match name {
        "evolve" => commands::evolve(&cfg, &mut dir)?,
        "phase-diagram" => commands::phase_diagram(&cfg, &mut dir)?,
        "floquet" => commands::floquet(&cfg, &mut dir)?,
        "recompile" => commands::recompile(&cfg, &mut dir)?,
        "noisy" => commands::noisy(&cfg, &mut dir, &config_dir)?,
        _ => unreachable!("clap restricts the command names"),
    }
    let resolved = toml::to_string(&cfg).context("serializing resolved config")?;
    let files = dir.finish(&text, &resolved)?;
    println!("wrote {} files to {}", files.len() + 1, out.display());
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
