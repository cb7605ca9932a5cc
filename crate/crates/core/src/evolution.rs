//! Time-domain counterpart of a pencil: the linear system `dB/dt = G B`
//! whose exponential solutions reproduce the pencil roots.

use std::io::Write;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::export::sci;
use crate::operators::{row_major, FieldComponents, QuadraticCoeffs, SpectralPencil};
use crate::spectral::{order_roots, PolynomialKind};

/// Trajectories stop once |B| exceeds this value.
pub const OVERFLOW_LIMIT: f64 = 1e300;
/// Default fraction of the trajectory dropped before fitting.
pub const DEFAULT_DISCARD_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSource {
    /// `G = -C^{-1} A` of a pencil.
    Pencil(SpectralPencil),
    /// Companion matrix of a monic polynomial.
    Companion {
        polynomial: PolynomialKind,
        coeffs: QuadraticCoeffs,
    },
}

/// Linear system `dB/dt = G B` for `B = (B_n, B_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSystem {
    pub generator: Matrix2<f64>,
    pub source: SystemSource,
}

impl EvolutionSystem {
    pub fn from_generator(generator: Matrix2<f64>) -> Self {
        let (tr, det) = (generator.trace(), generator.determinant());
        Self {
            generator,
            source: SystemSource::Companion {
                polynomial: PolynomialKind::Pencil,
                coeffs: QuadraticCoeffs::new(1.0, -tr, det),
            },
        }
    }

    /// Companion matrix `[[0, 1], [-c0, -c1]]` of the monic form of `coeffs`.
    pub fn companion(polynomial: PolynomialKind, coeffs: &QuadraticCoeffs) -> Result<Self> {
        if coeffs.c2 == 0.0 {
            return Err(Error::DegeneratePencil { det_c: 0.0 });
        }
        let m = coeffs.monic();
        Ok(Self {
            generator: Matrix2::new(0.0, 1.0, -m.c0, -m.c1),
            source: SystemSource::Companion {
                polynomial,
                coeffs: *coeffs,
            },
        })
    }

    /// Eigenvalues from the trace/determinant formula, in spectrum order.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = 0.5 * self.generator.trace();
        let det = self.generator.determinant();
        let disc = half_tr * half_tr - det;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            order_roots([
                Complex64::new(half_tr + sq, 0.0),
                Complex64::new(half_tr - sq, 0.0),
            ])
        } else {
            let sq = (-disc).sqrt();
            [Complex64::new(half_tr, sq), Complex64::new(half_tr, -sq)]
        }
    }

    pub fn generator_row_major(&self) -> [f64; 4] {
        row_major(&self.generator)
    }
}

/// `G = -C^{-1} A` via the closed-form 2x2 inverse.
pub fn to_evolution_system(pencil: &SpectralPencil) -> Result<EvolutionSystem> {
    let c = &pencil.c;
    let det = c.determinant();
    if det == 0.0 {
        return Err(Error::DegeneratePencil { det_c: det });
    }
    let c_inv = Matrix2::new(c[(1, 1)], -c[(0, 1)], -c[(1, 0)], c[(0, 0)]) / det;
    Ok(EvolutionSystem {
        generator: -(c_inv * pencil.a),
        source: SystemSource::Pencil(*pencil),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub t: f64,
    pub b_n: f64,
    pub b_b: f64,
    pub abs_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldTrajectory {
    pub samples: Vec<FieldSample>,
    pub dt: f64,
    /// Set when integration stopped early because |B| left the representable range.
    pub overflowed: bool,
}

impl FieldTrajectory {
    /// Writes `t, B_n, B_b, abs_B` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "B_n", "B_b", "abs_B"])?;
        for s in &self.samples {
            w.write_record([sci(s.t), sci(s.b_n), sci(s.b_b), sci(s.abs_b)])?;
        }
        w.flush()
    }
}

fn sample(t: f64, b: &Vector2<f64>) -> FieldSample {
    FieldSample {
        t,
        b_n: b.x,
        b_b: b.y,
        abs_b: b.x.hypot(b.y),
    }
}

/// Classical RK4 for `dB/dt = G B` on the grid `0, dt, ..., t_end`.
pub fn integrate(
    system: &EvolutionSystem,
    b0: &FieldComponents,
    t_end: f64,
    dt: f64,
) -> Result<FieldTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 10.0 * dt) {
        return Err(invalid(format!(
            "t_end must be at least 10 dt, got {t_end}"
        )));
    }
    if b0.b_n == 0.0 && b0.b_b == 0.0 {
        return Err(invalid("initial field is identically zero"));
    }
    let g = system.generator;
    let ratio = t_end / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let grid = |k: usize| if k == steps { t_end } else { k as f64 * dt };

    let mut b = Vector2::new(b0.b_n, b0.b_b);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(sample(0.0, &b));
    let mut overflowed = false;
    for k in 0..steps {
        let h = grid(k + 1) - grid(k);
        let k1 = g * b;
        let k2 = g * (b + k1 * (0.5 * h));
        let k3 = g * (b + k2 * (0.5 * h));
        let k4 = g * (b + k3 * h);
        let next = b + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        let s = sample(grid(k + 1), &next);
        if !(s.abs_b.is_finite() && s.abs_b <= OVERFLOW_LIMIT) {
            overflowed = true;
            break;
        }
        b = next;
        samples.push(s);
    }
    Ok(FieldTrajectory {
        samples,
        dt,
        overflowed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub lambda_fit: f64,
    pub stderr: f64,
    /// Time interval `[t_start, t_end]` of the samples used.
    pub window: [f64; 2],
}

/// Least-squares slope of `ln|B|` over the trailing `1 - discard_fraction` of the samples.
pub fn fit_growth_rate(traj: &FieldTrajectory, discard_fraction: f64) -> Result<GrowthFit> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(invalid(format!(
            "discard_fraction must lie in [0, 1), got {discard_fraction}"
        )));
    }
    let skip = (traj.samples.len() as f64 * discard_fraction).floor() as usize;
    let tail = &traj.samples[skip..];
    if tail.len() < 20 {
        return Err(invalid(format!(
            "{} samples remain after discarding, at least 20 are needed",
            tail.len()
        )));
    }
    if let Some(s) = tail.iter().find(|s| s.abs_b == 0.0) {
        return Err(Error::UndefinedLog { t: s.t });
    }
    let n = tail.len() as f64;
    // Centre both variables before accumulating to keep the sums well conditioned.
    let t_mean = tail.iter().map(|s| s.t).sum::<f64>() / n;
    let y_mean = tail.iter().map(|s| s.abs_b.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for s in tail {
        let dx = s.t - t_mean;
        sxx += dx * dx;
        sxy += dx * (s.abs_b.ln() - y_mean);
    }
    let slope = sxy / sxx;
    let sse: f64 = tail
        .iter()
        .map(|s| {
            let r = s.abs_b.ln() - y_mean - slope * (s.t - t_mean);
            r * r
        })
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(GrowthFit {
        lambda_fit: slope,
        stderr,
        window: [tail[0].t, tail[tail.len() - 1].t],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_pencil, PlasmaParams, Variant};
    use crate::spectral::{golden_polynomial, solve_pencil};
    use std::f64::consts::PI;

    fn product(al: f64, beta: f64, vs: f64, k: f64) -> PlasmaParams {
        PlasmaParams::from_product(al, beta, vs, k).unwrap()
    }

    fn field(bn: f64, bb: f64) -> FieldComponents {
        FieldComponents::new(bn, bb).unwrap()
    }

    #[test]
    fn zero_pencil_gives_zero_generator() {
        let p = build_pencil(Variant::OscillatoryLimit, &product(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(to_evolution_system(&p).unwrap().generator, Matrix2::zeros());
    }

    #[test]
    fn laminar_generator() {
        let p = build_pencil(Variant::Laminar, &product(-1.0, 0.0, -1.0, 1.0)).unwrap();
        let sys = to_evolution_system(&p).unwrap();
        assert_eq!(sys.generator, Matrix2::new(-1.0, 1.0, 2.0, 0.0));
        let spec = solve_pencil(&p).unwrap();
        for (a, b) in sys.eigenvalues().iter().zip(spec.roots.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn oscillatory_generator_eigenvalues() {
        let p = build_pencil(Variant::OscillatoryLimit, &product(0.0, 0.0, 1.0, 1.0)).unwrap();
        let ev = to_evolution_system(&p).unwrap().eigenvalues();
        assert_eq!(ev, [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]);
    }

    #[test]
    fn degenerate_c_rejected() {
        let mut p = build_pencil(Variant::Laminar, &product(1.0, 0.0, 1.0, 1.0)).unwrap();
        p.c = Matrix2::new(1.0, 2.0, 2.0, 4.0);
        assert!(matches!(
            to_evolution_system(&p),
            Err(Error::DegeneratePencil { .. })
        ));
    }

    #[test]
    fn constant_trajectory() {
        let sys = EvolutionSystem::from_generator(Matrix2::zeros());
        let tr = integrate(&sys, &field(1.0, 1.0), 1.0, 0.01).unwrap();
        assert_eq!(tr.samples.len(), 101);
        assert!(tr.samples.iter().all(|s| s.b_n == 1.0 && s.b_b == 1.0));
        assert_eq!(tr.samples.last().unwrap().t, 1.0);
    }

    #[test]
    fn decoupled_exponentials() {
        let sys = EvolutionSystem::from_generator(Matrix2::new(1.0, 0.0, 0.0, -2.0));
        let tr = integrate(&sys, &field(1.0, 1.0), 5.0, 1e-3).unwrap();
        let last = tr.samples.last().unwrap();
        assert!((last.b_n / 5f64.exp() - 1.0).abs() < 1e-6);
        assert!((last.b_b / (-10f64).exp() - 1.0).abs() < 1e-6);
        let fit = fit_growth_rate(&tr, 0.5).unwrap();
        assert!((fit.lambda_fit - 1.0).abs() < 1e-4, "{}", fit.lambda_fit);
        assert_eq!(fit.window[1], 5.0);
    }

    #[test]
    fn rotation_returns_to_start() {
        let sys = EvolutionSystem::from_generator(Matrix2::new(0.0, 1.0, -1.0, 0.0));
        let tr = integrate(&sys, &field(1.0, 0.0), 2.0 * PI, 1e-3).unwrap();
        let last = tr.samples.last().unwrap();
        assert!((last.b_n - 1.0).abs() < 1e-6 && last.b_b.abs() < 1e-6);
        let fit = fit_growth_rate(&tr, 0.5).unwrap();
        assert!(fit.lambda_fit.abs() < 1e-3);
    }

    #[test]
    fn golden_companion_growth() {
        let sys =
            EvolutionSystem::companion(PolynomialKind::Golden, &golden_polynomial(-1.0)).unwrap();
        let tr = integrate(&sys, &field(1.0, 1.0), 20.0, 1e-3).unwrap();
        let fit = fit_growth_rate(&tr, DEFAULT_DISCARD_FRACTION).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(
            (fit.lambda_fit / phi - 1.0).abs() < 1e-3,
            "{}",
            fit.lambda_fit
        );
    }

    #[test]
    fn overflow_truncates() {
        let sys = EvolutionSystem::from_generator(Matrix2::new(50.0, 0.0, 0.0, 0.0));
        let tr = integrate(&sys, &field(1.0, 0.0), 100.0, 1e-2).unwrap();
        assert!(tr.overflowed);
        assert!(tr.samples.last().unwrap().abs_b <= OVERFLOW_LIMIT);
        assert!(tr.samples.len() < 10_001);
    }

    #[test]
    fn integrate_preconditions() {
        let sys = EvolutionSystem::from_generator(Matrix2::identity());
        assert!(integrate(&sys, &field(0.0, 0.0), 1.0, 0.01).is_err());
        assert!(integrate(&sys, &field(1.0, 0.0), 0.05, 0.01).is_err());
        assert!(integrate(&sys, &field(1.0, 0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn fit_preconditions() {
        let sys = EvolutionSystem::from_generator(Matrix2::identity());
        let tr = integrate(&sys, &field(1.0, 0.0), 0.3, 0.01).unwrap();
        assert!(fit_growth_rate(&tr, 1.0).is_err());
        assert!(fit_growth_rate(&tr, 0.5).is_err());
        let mut zeroed = integrate(&sys, &field(1.0, 0.0), 1.0, 0.01).unwrap();
        zeroed.samples[80].abs_b = 0.0;
        assert!(matches!(
            fit_growth_rate(&zeroed, 0.5),
            Err(Error::UndefinedLog { .. })
        ));
    }

    #[test]
    fn trajectory_csv_header() {
        let sys = EvolutionSystem::from_generator(Matrix2::zeros());
        let tr = integrate(&sys, &field(1.0, 1.0), 0.1, 0.01).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,B_n,B_b,abs_B\n"));
        assert_eq!(text.lines().count(), 12);
    }
}
