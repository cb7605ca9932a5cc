//! Thin wrappers that turn a [`RunConfig`] into output bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use dynamo_spectra::audit::{audit_paper_claims, AuditTolerances};
use dynamo_spectra::evolution::{fit_growth_rate, integrate, to_evolution_system, EvolutionSystem};
use dynamo_spectra::export::sci;
use dynamo_spectra::geometry::{
    evolve_frame_with, exact_frame, frame_laplacian_residual, write_frames_csv, EvolveOptions,
    FilamentProfile, FrenetFrame,
};
use dynamo_spectra::operators::{build_pencil_with, printed_polynomial_eq18, FieldComponents};
use dynamo_spectra::spectral::{analyze, golden_polynomial, RootJson, SpectrumReport};
use dynamo_spectra::sweep::{regime_map, run_sweep, write_sweep_csv, SweepGrid};
use dynamo_spectra::{PlasmaParams, PolynomialKind, Variant};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const DEFAULT_AUDIT_PATH: &str = "audit_report.json";

const SPECTRUM_CSV_HEADER: &str = "variant,polynomial,kappa0,alpha_lambda,beta,v_s,re_gamma_plus,im_gamma_plus,re_gamma_minus,im_gamma_minus,regime,anosov";

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn emit(cfg: &RunConfig, default_path: Option<&str>, bytes: &[u8]) -> Result<(), CliError> {
    let path = cfg.output.as_deref().or(default_path.map(Path::new));
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(io_err)
        }
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(io_err)?;
    Ok(buf)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let (spectrum, class, limit) =
        analyze(cfg.polynomial, cfg.variant, &params, cfg.pencil_options())?;
    let report = SpectrumReport::new(&spectrum, &class, limit);
    let bytes = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => {
            let r = &report.roots;
            let row = [
                report.variant.as_str().to_string(),
                report.polynomial.as_str().to_string(),
                sci(params.kappa0),
                sci(params.alpha_lambda()),
                sci(params.beta),
                sci(params.v_s),
                sci(r[0].re),
                sci(r[0].im),
                sci(r[1].re),
                sci(r[1].im),
                report.regime.as_str().to_string(),
                report.anosov.to_string(),
            ];
            format!("{SPECTRUM_CSV_HEADER}\n{}\n", row.join(",")).into_bytes()
        }
    };
    emit(cfg, None, &bytes)
}

#[derive(Serialize)]
struct EvolveReport {
    variant: Variant,
    polynomial: PolynomialKind,
    params: PlasmaParams,
    generator: [f64; 4],
    eigenvalues: [RootJson; 2],
    max_re_root: f64,
    lambda_fit: f64,
    stderr: f64,
    window: [f64; 2],
    discard_fraction: f64,
    dt: f64,
    t_end: f64,
    samples: usize,
    overflowed: bool,
}

fn evolution_system(cfg: &RunConfig, params: &PlasmaParams) -> Result<EvolutionSystem, CliError> {
    Ok(match cfg.polynomial {
        PolynomialKind::Pencil => to_evolution_system(&build_pencil_with(
            cfg.variant,
            params,
            cfg.pencil_options(),
        )?)?,
        PolynomialKind::Eq18 => {
            EvolutionSystem::companion(PolynomialKind::Eq18, &printed_polynomial_eq18(params)?)?
        }
        PolynomialKind::Golden => EvolutionSystem::companion(
            PolynomialKind::Golden,
            &golden_polynomial(params.alpha_lambda()),
        )?,
    })
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let system = evolution_system(cfg, &params)?;
    let b0 = FieldComponents::new(cfg.b_n0, cfg.b_b0)?;
    let traj = integrate(&system, &b0, cfg.t_end, cfg.dt)?;
    let bytes = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => csv_bytes(|buf| traj.write_csv(buf))?,
        Format::Json => {
            let fit = fit_growth_rate(&traj, cfg.discard_fraction)?;
            let eigenvalues = system.eigenvalues();
            json(&EvolveReport {
                variant: cfg.variant,
                polynomial: cfg.polynomial,
                params,
                generator: system.generator_row_major(),
                eigenvalues: eigenvalues.map(RootJson::from),
                max_re_root: eigenvalues[0].re,
                lambda_fit: fit.lambda_fit,
                stderr: fit.stderr,
                window: fit.window,
                discard_fraction: cfg.discard_fraction,
                dt: cfg.dt,
                t_end: cfg.t_end,
                samples: traj.samples.len(),
                overflowed: traj.overflowed,
            })
        }
    };
    emit(cfg, None, &bytes)
}

fn sweep_grid(cfg: &RunConfig) -> Result<SweepGrid, CliError> {
    let params = cfg.params()?;
    let mut grid = SweepGrid::point(
        cfg.variant,
        params.kappa0,
        params.alpha_lambda(),
        params.beta,
        params.v_s,
    );
    grid.polynomial = cfg.polynomial;
    grid.options = cfg.pencil_options();
    grid.cap = cfg.cap;
    for (name, axis) in &cfg.grid {
        *grid.axis_mut(*name) = *axis;
    }
    Ok(grid)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = sweep_grid(cfg)?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let bytes = if cfg.regime_map {
        let slices = regime_map(&grid, cfg.slice)?;
        match format {
            Format::Json => json(&slices),
            Format::Csv => csv_bytes(|buf| {
                for (i, s) in slices.iter().enumerate() {
                    if i > 0 {
                        buf.push(b'\n');
                    }
                    if !s.fixed.is_empty() {
                        writeln!(buf, "# {}", s.describe_fixed())?;
                    }
                    s.write_csv(&mut *buf)?;
                }
                Ok(())
            })?,
        }
    } else {
        let rows = run_sweep(&grid)?;
        match format {
            Format::Json => json(&rows),
            Format::Csv => csv_bytes(|buf| write_sweep_csv(buf, &rows))?,
        }
    };
    emit(cfg, None, &bytes)
}

pub fn cmd_audit(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Config("the audit report is JSON only".into()));
    }
    let tolerances = AuditTolerances::from_map(&cfg.tolerances)?;
    let report = audit_paper_claims(&tolerances);
    emit(cfg, Some(DEFAULT_AUDIT_PATH), &json(&report))?;
    let flagged = report.entries.iter().filter(|e| !e.matched).count();
    eprintln!(
        "audit: {} claims evaluated, {} not reproduced as stated",
        report.entries.len(),
        flagged
    );
    Ok(())
}

#[derive(Serialize)]
struct GeometryReport {
    kappa0: f64,
    tau0: f64,
    s_end: f64,
    step: f64,
    reorthonormalize: bool,
    frames: usize,
    /// Deviation of the integrated end frame from the closed-form rotation.
    closure_residual: f64,
    /// Deviation of the end frame from the initial frame.
    return_residual: f64,
    max_orthonormality_defect: f64,
    laplacian_residual_t: f64,
    laplacian_residual_n: f64,
}

pub fn cmd_geometry(cfg: &RunConfig) -> Result<(), CliError> {
    let profile = FilamentProfile::new(cfg.kappa0, cfg.tau0())?;
    let frame0 = FrenetFrame::identity();
    let opts = EvolveOptions {
        reorthonormalize: cfg.reorthonormalize,
    };
    let frames = evolve_frame_with(&frame0, &profile, cfg.s_end, cfg.step, opts)?;
    let bytes = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => csv_bytes(|buf| write_frames_csv(buf, &frames))?,
        Format::Json => {
            let (s_last, last) = frames.last().expect("at least the initial frame");
            let (rt, rn) = frame_laplacian_residual(&profile)?;
            json(&GeometryReport {
                kappa0: profile.kappa0(),
                tau0: profile.tau0(),
                s_end: cfg.s_end,
                step: cfg.step,
                reorthonormalize: cfg.reorthonormalize,
                frames: frames.len(),
                closure_residual: last.distance(&exact_frame(&frame0, &profile, *s_last)),
                return_residual: last.distance(&frame0),
                max_orthonormality_defect: frames
                    .iter()
                    .map(|(_, f)| f.orthonormality_defect())
                    .fold(0.0, f64::max),
                laplacian_residual_t: rt,
                laplacian_residual_n: rn,
            })
        }
    };
    emit(cfg, None, &bytes)
}
