//! Run configuration: defaults, then a `key = value` file, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dynamo_spectra::sweep::{Axis, AxisName, DEFAULT_POINT_CAP};
use dynamo_spectra::{PencilOptions, PlasmaParams, PolynomialKind, Variant};

use crate::error::CliError;

pub const CAP_ENV: &str = "DYNAMO_SPECTRA_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!(
                "unknown format '{other}' (csv|json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: Variant,
    pub polynomial: PolynomialKind,
    pub assume_kappa4_typo: bool,
    pub kappa0: f64,
    /// Defaults to `kappa0` (helical filament) when unset.
    pub tau0: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub v_s: f64,
    pub lambda_lyap: f64,
    pub alpha_lambda: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub b_n0: f64,
    pub b_b0: f64,
    pub discard_fraction: f64,
    pub s_end: f64,
    pub step: f64,
    pub reorthonormalize: bool,
    pub grid: BTreeMap<AxisName, Axis>,
    pub slice: Option<(AxisName, AxisName)>,
    pub regime_map: bool,
    pub cap: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Laminar,
            polynomial: PolynomialKind::Pencil,
            assume_kappa4_typo: false,
            kappa0: 1.0,
            tau0: None,
            alpha: -1.0,
            beta: 0.0,
            v_s: -1.0,
            lambda_lyap: 1.0,
            alpha_lambda: None,
            dt: 1e-3,
            t_end: 20.0,
            b_n0: 1.0,
            b_b0: 1.0,
            discard_fraction: 0.5,
            s_end: 2.0 * std::f64::consts::PI,
            step: 1e-3,
            reorthonormalize: false,
            grid: BTreeMap::new(),
            slice: None,
            regime_map: false,
            cap: DEFAULT_POINT_CAP,
            tolerances: BTreeMap::new(),
            output: None,
            format: None,
        }
    }
}

fn num(key: &str, value: &str) -> Result<f64, CliError> {
    let x: f64 = value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: '{value}' is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("{key} must be finite")));
    }
    Ok(x)
}

fn flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!(
            "{key}: '{value}' is not a boolean"
        ))),
    }
}

/// `name=min:max:count[:log]`.
pub fn parse_grid(spec: &str) -> Result<(AxisName, Axis), CliError> {
    let (name, axis) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("grid '{spec}' is not name=min:max:count")))?;
    let name: AxisName = name.trim().parse()?;
    let axis: Axis = axis.parse()?;
    axis.validate(name)?;
    Ok((name, axis))
}

/// `row,col` axis names.
pub fn parse_slice(spec: &str) -> Result<(AxisName, AxisName), CliError> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("slice '{spec}' is not row_axis,col_axis")))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

/// `key=value` tolerance override.
pub fn parse_tolerance(spec: &str) -> Result<(String, f64), CliError> {
    let (k, v) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("tolerance '{spec}' is not key=value")))?;
    Ok((k.trim().to_string(), num(k, v.trim())?))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "variant" => self.variant = value.parse()?,
            "polynomial" => self.polynomial = value.parse()?,
            "assume_kappa4_typo" => self.assume_kappa4_typo = flag(&key, value)?,
            "kappa0" => self.kappa0 = num(&key, value)?,
            "tau0" => self.tau0 = Some(num(&key, value)?),
            "alpha" => self.alpha = num(&key, value)?,
            "beta" => self.beta = num(&key, value)?,
            "v_s" | "vs" => self.v_s = num(&key, value)?,
            "lambda" | "lambda_lyap" => self.lambda_lyap = num(&key, value)?,
            "alpha_lambda" => self.alpha_lambda = Some(num(&key, value)?),
            "dt" => self.dt = num(&key, value)?,
            "t_end" => self.t_end = num(&key, value)?,
            "bn0" | "b_n0" => self.b_n0 = num(&key, value)?,
            "bb0" | "b_b0" => self.b_b0 = num(&key, value)?,
            "discard" | "discard_fraction" => self.discard_fraction = num(&key, value)?,
            "s_end" => self.s_end = num(&key, value)?,
            "step" => self.step = num(&key, value)?,
            "reorthonormalize" => self.reorthonormalize = flag(&key, value)?,
            "grid" => {
                for part in value.split_whitespace() {
                    let (name, axis) = parse_grid(part)?;
                    self.grid.insert(name, axis);
                }
            }
            "slice" => self.slice = Some(parse_slice(value)?),
            "map" | "regime_map" => self.regime_map = flag(&key, value)?,
            "cap" => {
                self.cap = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("cap: '{value}' is not a count")))?
            }
            "tolerance" => {
                self.tolerances.insert("roots".into(), num(&key, value)?);
            }
            "output" | "o" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            k if k.starts_with("grid.") => {
                let (name, axis) = parse_grid(&format!("{}={value}", &k[5..]))?;
                self.grid.insert(name, axis);
            }
            k if k.starts_with("tolerance.") => {
                self.tolerances.insert(k[10..].to_string(), num(k, value)?);
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown configuration key '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// Parses flat `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(k, v)
                .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn apply_env(&mut self) -> Result<(), CliError> {
        if let Ok(v) = std::env::var(CAP_ENV) {
            self.cap = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{CAP_ENV}: '{v}' is not a count")))?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<PlasmaParams, CliError> {
        let p = PlasmaParams::new(
            self.alpha,
            self.beta,
            self.v_s,
            self.lambda_lyap,
            self.kappa0,
        )?;
        Ok(match self.alpha_lambda {
            Some(al) => p.with_alpha_lambda(al)?,
            None => p,
        })
    }

    pub fn pencil_options(&self) -> PencilOptions {
        PencilOptions {
            assume_kappa4_typo: self.assume_kappa4_typo,
        }
    }

    pub fn tau0(&self) -> f64 {
        self.tau0.unwrap_or(self.kappa0)
    }
}
