//! Filament geometry: Frenet frames, their arclength evolution and the
//! frame Laplacian identities used by the induction equations.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Result};
use crate::export::sci;

/// Orthonormality tolerance a freshly constructed frame must meet.
pub const FRAME_TOLERANCE: f64 = 1e-10;
/// Largest defect accepted for the initial frame of an integration.
pub const INITIAL_FRAME_TOLERANCE: f64 = 1e-8;

/// Tangent, normal and binormal unit vectors at one point of a filament.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub t: Vector3<f64>,
    pub n: Vector3<f64>,
    pub b: Vector3<f64>,
}

impl FrenetFrame {
    pub fn new(t: Vector3<f64>, n: Vector3<f64>, b: Vector3<f64>) -> Self {
        Self { t, n, b }
    }

    /// Frame aligned with the Cartesian axes.
    pub fn identity() -> Self {
        Self::new(Vector3::x(), Vector3::y(), Vector3::z())
    }

    /// Largest violation of unit length, mutual orthogonality and `b = t × n`.
    pub fn orthonormality_defect(&self) -> f64 {
        let norms = [self.t.norm(), self.n.norm(), self.b.norm()]
            .into_iter()
            .map(|x| (x - 1.0).abs());
        let dots = [
            self.t.dot(&self.n),
            self.n.dot(&self.b),
            self.b.dot(&self.t),
        ]
        .into_iter()
        .map(f64::abs);
        let handed = (self.t.cross(&self.n) - self.b).amax();
        norms.chain(dots).fold(handed, f64::max)
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.orthonormality_defect() <= tol
    }

    /// Gram-Schmidt on (t, n) followed by `b = t × n`.
    pub fn reorthonormalized(&self) -> Self {
        let t = self.t.normalize();
        let n = (self.n - t * t.dot(&self.n)).normalize();
        Self::new(t, n, t.cross(&n))
    }

    /// Largest component-wise distance between corresponding basis vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.t - other.t)
            .amax()
            .max((self.n - other.n).amax())
            .max((self.b - other.b).amax())
    }

    fn is_finite(&self) -> bool {
        self.t
            .iter()
            .chain(self.n.iter())
            .chain(self.b.iter())
            .all(|x| x.is_finite())
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self::new(self.t + d.t * h, self.n + d.n * h, self.b + d.b * h)
    }
}

/// Constant curvature and torsion of a filament.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilamentProfile {
    kappa0: f64,
    tau0: f64,
    helical: bool,
}

impl FilamentProfile {
    pub fn new(kappa0: f64, tau0: f64) -> Result<Self> {
        ensure_finite("kappa0", kappa0)?;
        ensure_finite("tau0", tau0)?;
        Ok(Self {
            kappa0,
            tau0,
            helical: kappa0 == tau0,
        })
    }

    /// Helical filament with torsion equal to curvature.
    pub fn helical(kappa0: f64) -> Result<Self> {
        Self::new(kappa0, kappa0)
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn is_helical(&self) -> bool {
        self.helical
    }
}

/// Curvature and torsion as functions of arclength.
pub trait FrameCoefficients {
    fn curvature_torsion(&self, s: f64) -> (f64, f64);
}

impl FrameCoefficients for FilamentProfile {
    fn curvature_torsion(&self, _s: f64) -> (f64, f64) {
        (self.kappa0, self.tau0)
    }
}

/// Arclength-dependent profile given by a closure returning `(kappa, tau)`.
pub struct VariableProfile<F>(pub F);

impl<F: Fn(f64) -> (f64, f64)> FrameCoefficients for VariableProfile<F> {
    fn curvature_torsion(&self, s: f64) -> (f64, f64) {
        (self.0)(s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvolveOptions {
    /// Re-orthonormalize after every step. Off by default so that drift stays observable.
    pub reorthonormalize: bool,
}

fn frenet_rhs<P: FrameCoefficients>(profile: &P, s: f64, f: &FrenetFrame) -> Result<FrenetFrame> {
    let (kappa, tau) = profile.curvature_torsion(s);
    if !kappa.is_finite() || !tau.is_finite() {
        return Err(invalid(format!(
            "profile is not finite at s = {s}: kappa = {kappa}, tau = {tau}"
        )));
    }
    Ok(FrenetFrame::new(
        f.n * kappa,
        f.b * tau - f.t * kappa,
        f.n * (-tau),
    ))
}

/// Integrates the Frenet-Serret equations with classical RK4 and returns the
/// frame at `s = 0, step, 2 step, ..., s_end`. The last step is shortened
/// when `s_end` is not a multiple of `step`.
pub fn evolve_frame<P: FrameCoefficients>(
    frame0: &FrenetFrame,
    profile: &P,
    s_end: f64,
    step: f64,
) -> Result<Vec<(f64, FrenetFrame)>> {
    evolve_frame_with(frame0, profile, s_end, step, EvolveOptions::default())
}

pub fn evolve_frame_with<P: FrameCoefficients>(
    frame0: &FrenetFrame,
    profile: &P,
    s_end: f64,
    step: f64,
    options: EvolveOptions,
) -> Result<Vec<(f64, FrenetFrame)>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    if !(s_end > 0.0 && s_end.is_finite()) {
        return Err(invalid(format!("s_end must be positive, got {s_end}")));
    }
    if !frame0.is_finite() || !frame0.is_orthonormal(INITIAL_FRAME_TOLERANCE) {
        return Err(invalid(format!(
            "initial frame is not orthonormal (defect {:e})",
            frame0.orthonormality_defect()
        )));
    }

    let ratio = s_end / step;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let grid = |k: usize| if k == steps { s_end } else { k as f64 * step };

    let mut out = Vec::with_capacity(steps + 1);
    let mut frame = *frame0;
    out.push((0.0, frame));
    for k in 0..steps {
        let s = grid(k);
        let h = grid(k + 1) - s;
        let k1 = frenet_rhs(profile, s, &frame)?;
        let k2 = frenet_rhs(profile, s + 0.5 * h, &frame.axpy(0.5 * h, &k1))?;
        let k3 = frenet_rhs(profile, s + 0.5 * h, &frame.axpy(0.5 * h, &k2))?;
        let k4 = frenet_rhs(profile, s + h, &frame.axpy(h, &k3))?;
        frame = FrenetFrame::new(
            frame.t + (k1.t + (k2.t + k3.t) * 2.0 + k4.t) * (h / 6.0),
            frame.n + (k1.n + (k2.n + k3.n) * 2.0 + k4.n) * (h / 6.0),
            frame.b + (k1.b + (k2.b + k3.b) * 2.0 + k4.b) * (h / 6.0),
        );
        if options.reorthonormalize {
            frame = frame.reorthonormalized();
        }
        out.push((grid(k + 1), frame));
    }
    Ok(out)
}

/// Closed-form frame for constant curvature and torsion: a rigid rotation
/// about the Darboux vector `tau t0 + kappa b0` at rate `sqrt(kappa^2 + tau^2)`.
pub fn exact_frame(frame0: &FrenetFrame, profile: &FilamentProfile, s: f64) -> FrenetFrame {
    let omega = frame0.t * profile.tau0 + frame0.b * profile.kappa0;
    let rate = omega.norm();
    if rate == 0.0 {
        return *frame0;
    }
    let axis = omega / rate;
    let (sin, cos) = (rate * s).sin_cos();
    let rotate =
        |v: &Vector3<f64>| v * cos + axis.cross(v) * sin + axis * axis.dot(v) * (1.0 - cos);
    FrenetFrame::new(rotate(&frame0.t), rotate(&frame0.n), rotate(&frame0.b))
}

/// Norms of `t'' + kappa0^2 t` and `n'' + kappa0^2 n` for a constant profile.
///
/// Second derivatives are taken exactly by applying the Frenet derivative
/// operator twice to coordinates in the (t, n, b) basis, so a zero residual
/// means the identity `Δv = -kappa0^2 v` holds on the nose. In closed form
/// the residuals are `|kappa0 tau0|` and `tau0^2`.
pub fn frame_laplacian_residual(profile: &FilamentProfile) -> Result<(f64, f64)> {
    ensure_finite("kappa0", profile.kappa0)?;
    ensure_finite("tau0", profile.tau0)?;
    let (k, tau) = (profile.kappa0, profile.tau0);
    // Column j holds the (t, n, b) coordinates of the derivative of basis vector j,
    // split into its curvature part K and torsion part T. The first two columns of
    // K^2 are exactly -k^2 times the identity, so the residual of the squared
    // operator there is (KT + TK + T^2) with no cancellation.
    let curvature = Matrix3::new(
        0.0, -k, 0.0, //
        k, 0.0, 0.0, //
        0.0, 0.0, 0.0,
    );
    let torsion = Matrix3::new(
        0.0, 0.0, 0.0, //
        0.0, 0.0, -tau, //
        0.0, tau, 0.0,
    );
    let residual = curvature * torsion + torsion * curvature + torsion * torsion;
    let t_res = residual.column(0);
    let n_res = residual.column(1);
    Ok((t_res.norm(), n_res.norm()))
}

/// Writes `s, t_x, t_y, t_z, n_x, n_y, n_z, b_x, b_y, b_z` rows.
pub fn write_frames_csv<W: Write>(writer: W, frames: &[(f64, FrenetFrame)]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "s", "t_x", "t_y", "t_z", "n_x", "n_y", "n_z", "b_x", "b_y", "b_z",
    ])?;
    for (s, f) in frames {
        let mut row = vec![sci(*s)];
        for v in [&f.t, &f.n, &f.b] {
            row.extend(v.iter().map(|x| sci(*x)));
        }
        w.write_record(&row)?;
    }
    w.flush()
}
