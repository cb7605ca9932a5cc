//! Parameter sweeps over the pencil parameters and 2D regime maps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::sci;
use crate::operators::{PencilOptions, PlasmaParams, Variant};
use crate::spectral::{analyze, DynamoClass, PolynomialKind, Regime, RootJson};

/// Default upper bound on the number of grid points.
pub const DEFAULT_POINT_CAP: u64 = 10_000_000;

pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "kappa0",
    "alpha_lambda",
    "beta",
    "v_s",
    "re_gamma_plus",
    "im_gamma_plus",
    "re_gamma_minus",
    "im_gamma_minus",
    "regime",
    "anosov",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Kappa0,
    AlphaLambda,
    Beta,
    VS,
}

impl AxisName {
    /// Row order of a sweep is lexicographic in this order.
    pub const ALL: [AxisName; 4] = [
        AxisName::Kappa0,
        AxisName::AlphaLambda,
        AxisName::Beta,
        AxisName::VS,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Kappa0 => "kappa0",
            AxisName::AlphaLambda => "alpha_lambda",
            AxisName::Beta => "beta",
            AxisName::VS => "v_s",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa0" => Ok(AxisName::Kappa0),
            "alpha_lambda" => Ok(AxisName::AlphaLambda),
            "beta" => Ok(AxisName::Beta),
            "v_s" | "vs" => Ok(AxisName::VS),
            other => Err(invalid(format!("unknown sweep axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn fixed(value: f64) -> Self {
        Self::linear(value, value, 1)
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self, name: AxisName) -> Result<()> {
        if self.count == 0 {
            return Err(invalid(format!("axis {name} needs at least one point")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(invalid(format!("axis {name} bounds must be finite")));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(invalid(format!(
                "log-spaced axis {name} requires positive bounds"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `min:max:count` with an optional `:log` or `:lin` suffix.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| invalid(format!("bad number '{x}' in axis '{s}'")))
        };
        let (min, max, count, spacing) = match parts.as_slice() {
            [v] => (num(v)?, num(v)?, "1", "lin"),
            [a, b, n] => (num(a)?, num(b)?, *n, "lin"),
            [a, b, n, sp] => (num(a)?, num(b)?, *n, *sp),
            _ => return Err(invalid(format!("axis '{s}' is not min:max:count[:log]"))),
        };
        let count = count
            .parse::<usize>()
            .map_err(|_| invalid(format!("bad count '{count}' in axis '{s}'")))?;
        let spacing = match spacing {
            "lin" | "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(invalid(format!("unknown spacing '{other}'"))),
        };
        Ok(Self {
            min,
            max,
            count,
            spacing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub kappa0: Axis,
    pub alpha_lambda: Axis,
    pub beta: Axis,
    pub v_s: Axis,
    pub variant: Variant,
    #[serde(default)]
    pub polynomial: PolynomialKind,
    #[serde(default)]
    pub options: PencilOptions,
    pub cap: u64,
}

impl SweepGrid {
    /// Single-point grid at the given parameters.
    pub fn point(variant: Variant, kappa0: f64, alpha_lambda: f64, beta: f64, v_s: f64) -> Self {
        Self {
            kappa0: Axis::fixed(kappa0),
            alpha_lambda: Axis::fixed(alpha_lambda),
            beta: Axis::fixed(beta),
            v_s: Axis::fixed(v_s),
            variant,
            polynomial: PolynomialKind::Pencil,
            options: PencilOptions::default(),
            cap: DEFAULT_POINT_CAP,
        }
    }

    pub fn axis(&self, name: AxisName) -> &Axis {
        match name {
            AxisName::Kappa0 => &self.kappa0,
            AxisName::AlphaLambda => &self.alpha_lambda,
            AxisName::Beta => &self.beta,
            AxisName::VS => &self.v_s,
        }
    }

    pub fn axis_mut(&mut self, name: AxisName) -> &mut Axis {
        match name {
            AxisName::Kappa0 => &mut self.kappa0,
            AxisName::AlphaLambda => &mut self.alpha_lambda,
            AxisName::Beta => &mut self.beta,
            AxisName::VS => &mut self.v_s,
        }
    }

    pub fn total_points(&self) -> u64 {
        AxisName::ALL
            .iter()
            .map(|a| self.axis(*a).count as u64)
            .fold(1u64, u64::saturating_mul)
    }

    pub fn validate(&self) -> Result<()> {
        for name in AxisName::ALL {
            self.axis(name).validate(name)?;
        }
        if self.beta.min < 0.0 || self.beta.max < 0.0 {
            return Err(invalid("beta axis must be non-negative"));
        }
        let points = self.total_points();
        if points > self.cap {
            return Err(Error::CapExceeded {
                points,
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn varying(&self) -> Vec<AxisName> {
        AxisName::ALL
            .into_iter()
            .filter(|a| self.axis(*a).count > 1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: PlasmaParams,
    pub roots: [RootJson; 2],
    pub regime: Regime,
    pub anosov: bool,
}

impl SweepRow {
    fn axis_value(&self, name: AxisName) -> f64 {
        match name {
            AxisName::Kappa0 => self.params.kappa0,
            AxisName::AlphaLambda => self.params.alpha_lambda(),
            AxisName::Beta => self.params.beta,
            AxisName::VS => self.params.v_s,
        }
    }
}

fn evaluate(grid: &SweepGrid, point: [f64; 4]) -> Result<SweepRow> {
    let [kappa0, alpha_lambda, beta, v_s] = point;
    let params = PlasmaParams::from_product(alpha_lambda, beta, v_s, kappa0)?;
    let (spectrum, class, _) = analyze(grid.polynomial, grid.variant, &params, grid.options)?;
    Ok(SweepRow {
        params,
        roots: spectrum.roots.map(RootJson::from),
        regime: class.regime,
        anosov: class.anosov,
    })
}

/// Evaluates every grid point; rows are ordered lexicographically over
/// (kappa0, alpha_lambda, beta, v_s) whatever order the workers finish in.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let values: Vec<Vec<f64>> = AxisName::ALL
        .iter()
        .map(|a| grid.axis(*a).values())
        .collect();
    let counts: Vec<usize> = values.iter().map(Vec::len).collect();
    let total = counts.iter().product::<usize>();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut point = [0.0; 4];
            for axis in (0..4).rev() {
                point[axis] = values[axis][rem % counts[axis]];
                rem /= counts[axis];
            }
            evaluate(grid, point)
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            sci(r.params.kappa0),
            sci(r.params.alpha_lambda()),
            sci(r.params.beta),
            sci(r.params.v_s),
            sci(r.roots[0].re),
            sci(r.roots[0].im),
            sci(r.roots[1].re),
            sci(r.roots[1].im),
            r.regime.to_string(),
            r.anosov.to_string(),
        ])?;
    }
    w.flush()
}

/// Regime labels over a 2D slice of a grid; remaining axes are held at `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeSlice {
    pub row_axis: AxisName,
    pub col_axis: AxisName,
    pub row_values: Vec<f64>,
    pub col_values: Vec<f64>,
    pub fixed: Vec<(AxisName, f64)>,
    pub cells: Vec<Vec<DynamoClass>>,
}

impl RegimeSlice {
    /// Matrix CSV: the corner cell names both axes, cells read `REGIME` or `REGIME+anosov`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![format!("{}\\{}", self.row_axis, self.col_axis)];
        header.extend(self.col_values.iter().map(|v| sci(*v)));
        w.write_record(&header)?;
        for (value, row) in self.row_values.iter().zip(&self.cells) {
            let mut rec = vec![sci(*value)];
            rec.extend(row.iter().map(|c| {
                if c.anosov {
                    format!("{}+anosov", c.regime)
                } else {
                    c.regime.to_string()
                }
            }));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn describe_fixed(&self) -> String {
        self.fixed
            .iter()
            .map(|(a, v)| format!("{a}={}", sci(*v)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// One regime map per combination of the axes not in the slice.
///
/// Without `slice`, at most two axes may vary; the map uses the varying axes,
/// padded with fixed axes in canonical order.
pub fn regime_map(
    grid: &SweepGrid,
    slice: Option<(AxisName, AxisName)>,
) -> Result<Vec<RegimeSlice>> {
    let varying = grid.varying();
    let (row_axis, col_axis) = match slice {
        Some((r, c)) if r == c => return Err(invalid("slice axes must differ")),
        Some(pair) => pair,
        None => {
            if varying.len() > 2 {
                return Err(Error::SliceRequired {
                    varying: varying.len(),
                });
            }
            let mut pick = varying.clone();
            for a in AxisName::ALL {
                if pick.len() == 2 {
                    break;
                }
                if !pick.contains(&a) {
                    pick.push(a);
                }
            }
            pick.sort();
            (pick[0], pick[1])
        }
    };
    let rows = run_sweep(grid)?;
    let row_values = grid.axis(row_axis).values();
    let col_values = grid.axis(col_axis).values();
    let others: Vec<AxisName> = AxisName::ALL
        .into_iter()
        .filter(|a| *a != row_axis && *a != col_axis)
        .collect();
    let counts: Vec<usize> = AxisName::ALL.iter().map(|a| grid.axis(*a).count).collect();
    let other_total: usize = others.iter().map(|a| counts[a.index()]).product();

    let mut slices = Vec::with_capacity(other_total);
    for combo in 0..other_total {
        let mut idx = [0usize; 4];
        let mut rem = combo;
        for a in others.iter().rev() {
            idx[a.index()] = rem % counts[a.index()];
            rem /= counts[a.index()];
        }
        let mut cells = Vec::with_capacity(row_values.len());
        for i in 0..row_values.len() {
            idx[row_axis.index()] = i;
            let mut line = Vec::with_capacity(col_values.len());
            for j in 0..col_values.len() {
                idx[col_axis.index()] = j;
                let flat = idx
                    .iter()
                    .zip(&counts)
                    .fold(0usize, |acc, (i, n)| acc * n + i);
                let r = &rows[flat];
                line.push(DynamoClass {
                    regime: r.regime,
                    anosov: r.anosov,
                    notes: String::new(),
                });
            }
            cells.push(line);
        }
        let first = &rows[idx
            .iter()
            .zip(&counts)
            .fold(0usize, |acc, (i, n)| acc * n + i)];
        slices.push(RegimeSlice {
            row_axis,
            col_axis,
            row_values: row_values.clone(),
            col_values: col_values.clone(),
            fixed: others.iter().map(|a| (*a, first.axis_value(*a))).collect(),
            cells,
        });
    }
    Ok(slices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing_and_values() {
        let a: Axis = "0:1:5".parse().unwrap();
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l: Axis = "1e-4:1:5:log".parse().unwrap();
        let v = l.values();
        assert_eq!(v[0], 1e-4);
        assert_eq!(v[4], 1.0);
        assert!((v[2] - 1e-2).abs() < 1e-15);
        assert_eq!("0:0:1".parse::<Axis>().unwrap().values(), vec![0.0]);
        assert_eq!("2.5".parse::<Axis>().unwrap().values(), vec![2.5]);
        assert!("1:2".parse::<Axis>().is_err());
        assert!("0:1:3:log"
            .parse::<Axis>()
            .unwrap()
            .validate(AxisName::Beta)
            .is_err());
        assert!("0:1:0"
            .parse::<Axis>()
            .unwrap()
            .validate(AxisName::Beta)
            .is_err());
    }

    #[test]
    fn golden_point() {
        let mut g = SweepGrid::point(Variant::Laminar, 1.0, -1.0, 0.0, -1.0);
        g.polynomial = PolynomialKind::Golden;
        let rows = run_sweep(&g).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].regime, Regime::Fast);
        assert!(rows[0].anosov);
    }

    #[test]
    fn flat_filament_is_marginal() {
        for v in Variant::ALL {
            let mut g = SweepGrid::point(v, 0.0, 0.0, 0.2, 1.0);
            g.v_s = Axis::linear(-1.0, 1.0, 5);
            let rows = run_sweep(&g).unwrap();
            for r in &rows {
                assert_eq!(r.roots.map(|x| (x.re, x.im)), [(0.0, 0.0); 2], "{v}");
                assert_eq!(r.regime, Regime::Marginal);
            }
        }
    }

    #[test]
    fn oscillatory_grid_pattern() {
        let mut g = SweepGrid::point(Variant::OscillatoryLimit, 0.0, 0.0, 0.0, 0.0);
        g.kappa0 = Axis {
            min: 0.5,
            max: 2.0,
            count: 3,
            spacing: Spacing::Log,
        };
        g.v_s = Axis::linear(-1.0, 1.0, 3);
        let rows = run_sweep(&g).unwrap();
        assert_eq!(rows.len(), 9);
        for (i, k) in [0.5, 1.0, 2.0].iter().enumerate() {
            for (j, vs) in [-1.0, 0.0, 1.0].iter().enumerate() {
                let r = &rows[i * 3 + j];
                assert!((r.params.kappa0 - k).abs() < 1e-15);
                assert_eq!(r.params.v_s, *vs);
                let sq = -k * k * vs;
                let expect = if sq >= 0.0 {
                    [(sq.sqrt(), 0.0), (-sq.sqrt(), 0.0)]
                } else {
                    [(0.0, (-sq).sqrt()), (0.0, -(-sq).sqrt())]
                };
                for (got, want) in r.roots.iter().zip(expect) {
                    assert!((got.re - want.0).abs() < 1e-14 && (got.im - want.1).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut g = SweepGrid::point(Variant::Laminar, 1.0, 1.0, 0.0, 1.0);
        g.kappa0 = Axis::linear(0.0, 1.0, 100);
        g.v_s = Axis::linear(0.0, 1.0, 100);
        g.cap = 1000;
        assert_eq!(
            run_sweep(&g).unwrap_err(),
            Error::CapExceeded {
                points: 10_000,
                cap: 1000
            }
        );
    }

    #[test]
    fn regime_map_needs_slice_for_three_axes() {
        let mut g = SweepGrid::point(Variant::GeneralBeta, 1.0, 1.0, 0.1, 1.0);
        g.kappa0 = Axis::linear(0.5, 1.0, 2);
        g.beta = Axis::linear(0.1, 0.2, 2);
        g.v_s = Axis::linear(-1.0, 1.0, 2);
        assert!(matches!(
            regime_map(&g, None),
            Err(Error::SliceRequired { varying: 3 })
        ));
        let slices = regime_map(&g, Some((AxisName::Kappa0, AxisName::VS))).unwrap();
        assert_eq!(slices.len(), 2);
        assert_eq!(
            slices[1].fixed,
            vec![(AxisName::AlphaLambda, 1.0), (AxisName::Beta, 0.2)]
        );
    }

    #[test]
    fn oscillatory_half_planes() {
        let mut g = SweepGrid::point(Variant::OscillatoryLimit, 1.0, 0.0, 0.0, 0.0);
        g.kappa0 = Axis::linear(0.25, 2.0, 8);
        g.v_s = Axis::linear(-1.0, 1.0, 9);
        let slices = regime_map(&g, None).unwrap();
        assert_eq!(slices.len(), 1);
        let s = &slices[0];
        assert_eq!((s.row_axis, s.col_axis), (AxisName::Kappa0, AxisName::VS));
        for row in &s.cells {
            for (vs, c) in s.col_values.iter().zip(row) {
                let want = if *vs > 0.0 {
                    Regime::Oscillatory
                } else if *vs < 0.0 {
                    Regime::Fast
                } else {
                    Regime::Marginal
                };
                assert_eq!(c.regime, want, "v_s = {vs}");
            }
        }
    }

    #[test]
    fn golden_mode_laminar_is_fast_anosov() {
        let mut g = SweepGrid::point(Variant::Laminar, 1.0, 0.0, 0.0, -1.0);
        g.polynomial = PolynomialKind::Golden;
        g.alpha_lambda = Axis::linear(-2.0, -0.5, 16);
        let slices = regime_map(&g, None).unwrap();
        for c in slices.iter().flat_map(|s| s.cells.iter().flatten()) {
            assert_eq!(c.regime, Regime::Fast);
            assert!(c.anosov);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let mut g = SweepGrid::point(Variant::ZeroHelicityTurbulent, 1.0, 0.0, 0.1, 1.0);
        g.kappa0 = Axis::linear(0.1, 3.0, 7);
        g.v_s = Axis::linear(-2.0, 2.0, 7);
        let render = || {
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &run_sweep(&g).unwrap()).unwrap();
            buf
        };
        let a = render();
        assert_eq!(a, render());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_CSV_HEADER.join(","));
        assert_eq!(text.lines().count(), 50);
    }
}
