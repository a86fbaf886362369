use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use navslip::commands;
use navslip::{AppError, Config, Overrides};
use navslip_core::experiments::StudyKind;

/// Stochastic Navier-Stokes on the unit disk with Navier slip: basis
/// construction, simulation, energy audits and viscosity studies.
#[derive(Parser, Debug)]
#[command(name = "navslip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Number of basis modes K.
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    tfinal: Option<f64>,
    /// Friction coefficient.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Noise covariance exponent.
    #[arg(long, global = true)]
    m: Option<u32>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Also write tidy long-format CSV.
    #[arg(long, global = true)]
    plot_data: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build (or reuse) the basis cache and run the basis checks.
    Basis,
    /// Integrate one trajectory and audit its energy balance.
    Simulate,
    /// Monte Carlo study across the viscosity grid.
    Study {
        #[arg(value_enum)]
        kind: Kind,
    },
    /// Energy-balance residual under time-step refinement on one path.
    Audit,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Invlimit,
    Uniform,
    Vorticity,
}

fn run(cli: Cli) -> Result<(), AppError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        out: cli.out,
        nu: cli.nu,
        modes: cli.modes,
        dt: cli.dt,
        t_final: cli.tfinal,
        alpha: cli.alpha,
        m: cli.m,
        samples: cli.samples,
        plot_data: cli.plot_data,
    });
    env_logger::Builder::new()
        .filter_level(cfg.log_level()?)
        .format_target(false)
        .init();
    match cli.command {
        Command::Basis => commands::cmd_basis(&cfg),
        Command::Simulate => commands::cmd_simulate(&cfg),
        Command::Study { kind } => {
            let kind = match kind {
                Kind::Invlimit => StudyKind::InviscidLimit,
                Kind::Uniform => StudyKind::UniformEnergy,
                Kind::Vorticity => StudyKind::Vorticity { p: cfg.study.p },
            };
            commands::cmd_study(&cfg, kind).map(|_| ())
        }
        Command::Audit => commands::cmd_audit(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
