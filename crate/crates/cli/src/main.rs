//! `dynamo-spectra` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degenerate mathematics,
//! 4 I/O error, 5 resource cap exceeded.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_grid, parse_slice, parse_tolerance, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "dynamo-spectra",
    version,
    about = "Growth-rate spectra of filamentary alpha-squared dynamos"
)]
struct Cli {
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted; audit defaults to audit_report.json).
    #[arg(short = 'o', long = "output", global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve and classify the spectrum of one operator.
    #[command(allow_negative_numbers = true)]
    Spectrum(PencilArgs),
    /// Integrate dB/dt = G B and fit the growth rate.
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Sweep parameters and tabulate spectra or regime maps.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Compare computed spectra with the published closed-form claims.
    #[command(allow_negative_numbers = true)]
    Audit(AuditArgs),
    /// Integrate the Frenet frame and check the frame identities.
    #[command(allow_negative_numbers = true)]
    Geometry(GeometryArgs),
}

#[derive(Args, Debug, Default)]
struct PencilArgs {
    /// general-beta | laminar | zero-helicity | oscillatory
    #[arg(long)]
    variant: Option<String>,
    /// pencil | eq18 | golden
    #[arg(long)]
    polynomial: Option<String>,
    /// Filament curvature kappa0.
    #[arg(long)]
    kappa0: Option<f64>,
    /// Helicity coefficient alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Turbulent diffusivity beta (>= 0).
    #[arg(long)]
    beta: Option<f64>,
    /// Tangential flow speed v_s.
    #[arg(long = "vs", alias = "v-s")]
    vs: Option<f64>,
    /// Lyapunov factor lambda.
    #[arg(long)]
    lambda: Option<f64>,
    /// Pin the product alpha*lambda directly.
    #[arg(long = "alpha-lambda")]
    alpha_lambda: Option<f64>,
    /// Use beta*kappa0^2 instead of the printed beta*kappa0^4 entry.
    #[arg(long)]
    assume_kappa4_typo: bool,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    pencil: PencilArgs,
    /// RK4 time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Integration horizon.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Initial normal component B_n.
    #[arg(long)]
    bn0: Option<f64>,
    /// Initial binormal component B_b.
    #[arg(long)]
    bb0: Option<f64>,
    /// Leading fraction of the trajectory excluded from the fit.
    #[arg(long)]
    discard: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    pencil: PencilArgs,
    /// Axis range `name=min:max:count[:log]`; name is kappa0, alpha_lambda, beta or v_s.
    #[arg(long = "grid", value_name = "AXIS")]
    grid: Vec<String>,
    /// Emit regime maps instead of the row table.
    #[arg(long)]
    map: bool,
    /// Axes of the regime map, `row,col`.
    #[arg(long)]
    slice: Option<String>,
    /// Maximum number of grid points.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Absolute tolerance on roots, limits and residuals.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Per-key override `key=value` (roots, coefficients or a claim id a..h).
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    /// Curvature kappa0.
    #[arg(long)]
    kappa0: Option<f64>,
    /// Torsion; defaults to kappa0 (helical filament).
    #[arg(long)]
    tau0: Option<f64>,
    /// Arclength to integrate to.
    #[arg(long = "s-end")]
    s_end: Option<f64>,
    /// RK4 arclength step.
    #[arg(long)]
    step: Option<f64>,
    /// Project back onto an orthonormal frame after every step.
    #[arg(long)]
    reorthonormalize: bool,
}

fn apply_pencil_args(cfg: &mut RunConfig, a: &PencilArgs) -> Result<(), CliError> {
    if let Some(v) = &a.variant {
        cfg.set("variant", v)?;
    }
    if let Some(v) = &a.polynomial {
        cfg.set("polynomial", v)?;
    }
    let numbers = [
        ("kappa0", a.kappa0),
        ("alpha", a.alpha),
        ("beta", a.beta),
        ("v_s", a.vs),
        ("lambda", a.lambda),
        ("alpha_lambda", a.alpha_lambda),
    ];
    for (key, value) in numbers {
        if let Some(x) = value {
            cfg.set(key, &x.to_string())?;
        }
    }
    if a.assume_kappa4_typo {
        cfg.assume_kappa4_typo = true;
    }
    Ok(())
}

fn set_numbers(cfg: &mut RunConfig, pairs: &[(&str, Option<f64>)]) -> Result<(), CliError> {
    for (key, value) in pairs {
        if let Some(x) = value {
            cfg.set(key, &x.to_string())?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    cfg.apply_env()?;
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = &cli.format {
        cfg.format = Some(f.parse()?);
    }
    match &cli.command {
        Command::Spectrum(a) => {
            apply_pencil_args(&mut cfg, a)?;
            commands::cmd_spectrum(&cfg)
        }
        Command::Evolve(a) => {
            apply_pencil_args(&mut cfg, &a.pencil)?;
            set_numbers(
                &mut cfg,
                &[
                    ("dt", a.dt),
                    ("t_end", a.t_end),
                    ("bn0", a.bn0),
                    ("bb0", a.bb0),
                    ("discard", a.discard),
                ],
            )?;
            commands::cmd_evolve(&cfg)
        }
        Command::Sweep(a) => {
            apply_pencil_args(&mut cfg, &a.pencil)?;
            for g in &a.grid {
                let (name, axis) = parse_grid(g)?;
                cfg.grid.insert(name, axis);
            }
            if a.map {
                cfg.regime_map = true;
            }
            if let Some(s) = &a.slice {
                cfg.slice = Some(parse_slice(s)?);
            }
            if let Some(cap) = a.cap {
                cfg.cap = cap;
            }
            commands::cmd_sweep(&cfg)
        }
        Command::Audit(a) => {
            if let Some(t) = a.tolerance {
                cfg.set("tolerance", &t.to_string())?;
            }
            for t in &a.tol {
                let (k, v) = parse_tolerance(t)?;
                cfg.tolerances.insert(k, v);
            }
            commands::cmd_audit(&cfg)
        }
        Command::Geometry(a) => {
            set_numbers(
                &mut cfg,
                &[
                    ("kappa0", a.kappa0),
                    ("tau0", a.tau0),
                    ("s_end", a.s_end),
                    ("step", a.step),
                ],
            )?;
            if a.reorthonormalize {
                cfg.reorthonormalize = true;
            }
            commands::cmd_geometry(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dynamo-spectra: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
