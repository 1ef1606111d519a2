use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod error;
mod output;
mod suites;

use config::Config;
use error::CliError;
use output::Output;
use suites::Ctx;

/// Property suites for geodesic ray transforms on conformal disks.
#[derive(Parser, Debug)]
#[command(name = "smtomo", version)]
struct Cli {
    /// TOML experiment file; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Artifact directory (overrides experiment.out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized fixtures (overrides experiment.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tensor rank for the rank-dependent suites (overrides experiment.rank).
    #[arg(long, global = true)]
    rank: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Multiply every grid by 2^k and divide the ray step by 2^k.
    #[arg(long, global = true, default_value_t = 0)]
    refine: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify non-trapping, absence of conjugate points and boundary convexity.
    Simplicity,
    /// Compare both sides of Santalo's formula.
    Santalo,
    /// Pair the ray transform against the invariant extension.
    AdjointCheck,
    /// Check that potentials dp are invisible to the transform.
    KernelCheck,
    /// Solenoidal/potential decomposition of a constructed tensor.
    Decompose,
    /// Solenoidal extension of a 1-form across an annulus.
    ExtendM1,
    /// Degree shifts, adjointness and the transport dictionary on the fibers.
    Harmonics,
    /// Round trip v -> I_m v -> reconstruction.
    Reconstruct,
    /// Build a first integral with a prescribed tensor moment.
    FirstIntegral,
    /// Write a named fixture (P_POLY, ROT, TF2, GAUSS, RANDOM) to CSV.
    EmitFixture { name: Option<String> },
    /// Run the experiment named in the config file.
    Run,
    /// Print the effective configuration as TOML.
    PrintConfig,
}

impl Command {
    fn name(&self) -> Option<&'static str> {
        Some(match self {
            Command::Simplicity => "simplicity",
            Command::Santalo => "santalo",
            Command::AdjointCheck => "adjoint-check",
            Command::KernelCheck => "kernel-check",
            Command::Decompose => "decompose",
            Command::ExtendM1 => "extend-m1",
            Command::Harmonics => "harmonics",
            Command::Reconstruct => "reconstruct",
            Command::FirstIntegral => "first-integral",
            Command::EmitFixture { .. } => "emit-fixture",
            Command::Run | Command::PrintConfig => return None,
        })
    }
}

fn effective_config(cli: &Cli) -> Result<Config, CliError> {
    let mut c = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(o) = &cli.out {
        c.experiment.out = o.clone();
    }
    if let Some(s) = cli.seed {
        c.experiment.seed = s;
    }
    if let Some(r) = cli.rank {
        c.experiment.rank = r;
    }
    c.validate()?;
    let c = c.refined(cli.refine);
    c.validate()?;
    Ok(c)
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = effective_config(cli)?;
    if let Command::PrintConfig = cli.command {
        print!("{}", config.to_toml());
        return Ok(0);
    }
    let name = match cli.command.name() {
        Some(n) => n.to_string(),
        None => config.experiment.name.clone(),
    };
    let fixture = match &cli.command {
        Command::EmitFixture { name } => name.clone(),
        _ => None,
    };
    let ctx = Ctx::new(config.clone())?;
    let mut out = Output::create(&config.experiment.out)?;
    suites::run(&name, &ctx, &mut out, fixture.as_deref())?;
    for c in out.checks() {
        println!("[{}] {}: {:.3e} ({} {:.1e})", if c.pass { "ok" } else { "!!" }, c.name, c.value, c.relation, c.limit);
    }
    let pass = out.finish(&name, &config, cli.refine)?;
    println!("{name}: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("smtomo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
