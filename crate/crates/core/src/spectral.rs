//! Closed-form spectra of the quadratic pencils, regime classification and
//! detection of golden-ratio (Anosov) eigenvalue branches.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operators::{
    build_pencil_with, characteristic_coeffs, printed_polynomial_eq18, PencilOptions, PlasmaParams,
    QuadraticCoeffs, SpectralPencil, Variant,
};

/// Threshold separating growing, marginal and decaying modes.
pub const REGIME_TOLERANCE: f64 = 1e-9;

/// Default `beta` sequence used to estimate the `beta -> 0` limit.
pub const DEFAULT_BETA_SEQUENCE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Stretching factor `(-1 + sqrt 5) / 2`.
pub fn golden_plus() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Squeezing factor `(-1 - sqrt 5) / 2`.
pub fn golden_minus() -> f64 {
    -(5f64.sqrt() + 1.0) / 2.0
}

/// Which quadratic produced a spectrum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolynomialKind {
    /// Determinant of the printed operator matrix.
    #[default]
    Pencil,
    /// The laminar second-order polynomial exactly as printed.
    Eq18,
    /// `gamma^2 + (alpha lambda) gamma - (alpha lambda)^2`, whose roots are the golden pair.
    Golden,
}

impl PolynomialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolynomialKind::Pencil => "pencil",
            PolynomialKind::Eq18 => "eq18",
            PolynomialKind::Golden => "golden",
        }
    }
}

impl fmt::Display for PolynomialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolynomialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pencil" => Ok(PolynomialKind::Pencil),
            "eq18" => Ok(PolynomialKind::Eq18),
            "golden" => Ok(PolynomialKind::Golden),
            other => Err(invalid(format!("unknown polynomial '{other}'"))),
        }
    }
}

/// Pair of growth rates, ordered by descending real part, then descending imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub roots: [Complex64; 2],
    pub variant: Variant,
    pub polynomial: PolynomialKind,
    pub params: PlasmaParams,
}

impl Spectrum {
    pub fn new(
        roots: [Complex64; 2],
        variant: Variant,
        polynomial: PolynomialKind,
        params: PlasmaParams,
    ) -> Self {
        Self {
            roots: order_roots(roots),
            variant,
            polynomial,
            params,
        }
    }

    pub fn max_re(&self) -> f64 {
        self.roots[0].re
    }

    /// Whether the regime of this spectrum needs a `beta -> 0` estimate.
    pub fn depends_on_beta(&self) -> bool {
        self.polynomial == PolynomialKind::Pencil && self.variant.depends_on_beta()
    }
}

fn cmp_roots(a: &Complex64, b: &Complex64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub(crate) fn order_roots(mut roots: [Complex64; 2]) -> [Complex64; 2] {
    // Adding +0.0 turns a signed zero into +0.0 and leaves everything else alone.
    for r in &mut roots {
        *r = Complex64::new(r.re + 0.0, r.im + 0.0);
    }
    if cmp_roots(&roots[0], &roots[1]) == Ordering::Greater {
        roots.swap(0, 1);
    }
    roots
}

/// Both roots of `c2 x^2 + c1 x + c0` with `c2 != 0`.
///
/// Coefficients are rescaled by a power of two, the larger-magnitude root is
/// taken from the cancellation-free branch and the other follows from the
/// product of the roots. Complex roots are returned as an exact conjugate pair.
pub fn solve_quadratic(coeffs: &QuadraticCoeffs) -> Result<[Complex64; 2]> {
    let QuadraticCoeffs { c2, c1, c0 } = *coeffs;
    if c2 == 0.0 {
        return Err(Error::DegeneratePencil { det_c: c2 });
    }
    if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
        return Err(invalid("non-finite polynomial coefficient"));
    }
    let biggest = c2.abs().max(c1.abs()).max(c0.abs());
    let scale = 2f64.powi(-(biggest.log2().floor() as i32));
    let (a, b, c) = (c2 * scale, c1 * scale, c0 * scale);

    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + disc.sqrt().copysign(b));
        if q == 0.0 {
            return Ok([Complex64::new(0.0, 0.0); 2]);
        }
        let r1 = q / a;
        let r2 = c / q;
        Ok(order_roots([
            Complex64::new(r1, 0.0),
            Complex64::new(r2, 0.0),
        ]))
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        Ok([Complex64::new(re, im), Complex64::new(re, -im)])
    }
}

/// `|c2 x^2 + c1 x + c0|` evaluated in complex arithmetic.
pub fn polynomial_residual(coeffs: &QuadraticCoeffs, x: Complex64) -> f64 {
    ((x * coeffs.c2 + coeffs.c1) * x + coeffs.c0).norm()
}

/// `|det(A + gamma C)|` for a complex `gamma`.
pub fn pencil_residual(pencil: &SpectralPencil, gamma: Complex64) -> f64 {
    let m = |i: usize, j: usize| Complex64::new(pencil.a[(i, j)], 0.0) + gamma * pencil.c[(i, j)];
    (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).norm()
}

pub fn solve_pencil(pencil: &SpectralPencil) -> Result<Spectrum> {
    let det_c = pencil.det_c();
    if det_c == 0.0 {
        return Err(Error::DegeneratePencil { det_c });
    }
    let roots = solve_quadratic(&characteristic_coeffs(pencil))?;
    Ok(Spectrum::new(
        roots,
        pencil.variant,
        PolynomialKind::Pencil,
        pencil.params,
    ))
}

/// The two branches `alpha lambda (-1 +- sqrt 5) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenRoots {
    /// `alpha lambda (-1 + sqrt 5) / 2`.
    pub plus: f64,
    /// `alpha lambda (-1 - sqrt 5) / 2`.
    pub minus: f64,
    /// Set when `alpha lambda = 0` and both roots collapse to zero.
    pub degenerate: bool,
}

impl GoldenRoots {
    pub fn as_complex(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.plus, 0.0),
            Complex64::new(self.minus, 0.0),
        ]
    }
}

/// Roots of `gamma^2 + (alpha lambda) gamma - (alpha lambda)^2 = 0`.
pub fn golden_polynomial_roots(alpha_lambda: f64) -> GoldenRoots {
    GoldenRoots {
        plus: alpha_lambda * golden_plus(),
        minus: alpha_lambda * golden_minus(),
        degenerate: alpha_lambda == 0.0,
    }
}

/// Monic coefficients of the golden polynomial.
pub fn golden_polynomial(alpha_lambda: f64) -> QuadraticCoeffs {
    QuadraticCoeffs::new(1.0, alpha_lambda, -alpha_lambda * alpha_lambda)
}

/// Spectrum of the chosen polynomial at `params`.
pub fn spectrum_for(
    polynomial: PolynomialKind,
    variant: Variant,
    params: &PlasmaParams,
    options: PencilOptions,
) -> Result<Spectrum> {
    match polynomial {
        PolynomialKind::Pencil => solve_pencil(&build_pencil_with(variant, params, options)?),
        PolynomialKind::Eq18 => {
            let roots = solve_quadratic(&printed_polynomial_eq18(params)?)?;
            Ok(Spectrum::new(roots, variant, polynomial, *params))
        }
        PolynomialKind::Golden => {
            params.validate()?;
            let g = golden_polynomial_roots(params.alpha_lambda());
            Ok(Spectrum::new(g.as_complex(), variant, polynomial, *params))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Regime {
    Fast,
    Marginal,
    Decaying,
    Oscillatory,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Fast => "FAST",
            Regime::Marginal => "MARGINAL",
            Regime::Decaying => "DECAYING",
            Regime::Oscillatory => "OSCILLATORY",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamoClass {
    pub regime: Regime,
    pub anosov: bool,
    pub notes: String,
}

/// Classifies a spectrum.
///
/// The deciding quantity is `beta_limit` when given, otherwise the largest
/// real part. Purely imaginary pairs are OSCILLATORY regardless. The Anosov
/// flag is set when the roots are a non-degenerate real multiple of the
/// golden pair, i.e. `gamma^2 + k gamma - k^2` with `k = -(gamma_1 + gamma_2) != 0`.
pub fn classify(spectrum: &Spectrum, beta_limit: Option<f64>) -> Result<DynamoClass> {
    if spectrum.depends_on_beta() && beta_limit.is_none() {
        return Err(Error::Contract(format!(
            "variant {} depends on beta; a beta -> 0 limit is required",
            spectrum.variant
        )));
    }
    let limit = beta_limit.unwrap_or_else(|| spectrum.max_re());
    let oscillatory = spectrum
        .roots
        .iter()
        .all(|r| r.re.abs() <= REGIME_TOLERANCE && r.im.abs() > REGIME_TOLERANCE);
    let regime = if oscillatory {
        Regime::Oscillatory
    } else if limit > REGIME_TOLERANCE {
        Regime::Fast
    } else if limit < -REGIME_TOLERANCE {
        Regime::Decaying
    } else {
        Regime::Marginal
    };
    let scale = golden_scale(&spectrum.roots);
    let anosov = scale.is_some();
    let mut notes = match beta_limit {
        Some(l) => format!("beta->0 limit of max Re gamma = {l:e}"),
        None => format!("max Re gamma = {:e}", spectrum.max_re()),
    };
    if let Some(k) = scale {
        notes.push_str(&format!("; golden pair with scale {k:e}"));
    }
    Ok(DynamoClass {
        regime,
        anosov,
        notes,
    })
}

/// Scale `k` for which the roots equal `k (-1 +- sqrt 5) / 2`, if any.
pub fn golden_scale(roots: &[Complex64; 2]) -> Option<f64> {
    let k = -(roots[0].re + roots[1].re);
    if !k.is_finite() || k.abs() <= REGIME_TOLERANCE {
        return None;
    }
    let tol = REGIME_TOLERANCE * k.abs().max(1.0);
    anosov_branch_check_roots(roots, k, tol)
        .ok()
        .filter(|c| c.matches)
        .map(|_| k)
}

/// Per-root distance to the golden pair `kappa (-1 +- sqrt 5) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnosovCheck {
    pub matches: bool,
    /// Deviation of each root (in spectrum order) from its paired target.
    pub deviations: [f64; 2],
    /// Targets paired with each root.
    pub targets: [f64; 2],
}

pub fn anosov_branch_check(spectrum: &Spectrum, kappa: f64, tol: f64) -> Result<AnosovCheck> {
    anosov_branch_check_roots(&spectrum.roots, kappa, tol)
}

pub fn anosov_branch_check_roots(
    roots: &[Complex64; 2],
    kappa: f64,
    tol: f64,
) -> Result<AnosovCheck> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let g = [kappa * golden_plus(), kappa * golden_minus()];
    let dev = |r: &Complex64, t: f64| (r - t).norm();
    let straight = [dev(&roots[0], g[0]), dev(&roots[1], g[1])];
    let crossed = [dev(&roots[0], g[1]), dev(&roots[1], g[0])];
    let (deviations, targets) = if crossed[0].max(crossed[1]) < straight[0].max(straight[1]) {
        (crossed, [g[1], g[0]])
    } else {
        (straight, g)
    };
    Ok(AnosovCheck {
        matches: deviations.iter().all(|d| *d <= tol),
        deviations,
        targets,
    })
}

/// Estimate of `lim_{beta -> 0} max Re gamma(beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaLimit {
    pub limit: f64,
    /// `(beta, max Re gamma)` for the input sequence followed by any refinement values.
    pub samples: Vec<(f64, f64)>,
}

/// Most extra `beta` values appended below the caller's sequence.
pub const MAX_BETA_REFINEMENTS: usize = 12;

/// Solves the pencil along a decreasing `beta` sequence and extrapolates the
/// leading real part to `beta = 0` with a quadratic through the three smallest
/// `beta` values. The sequence is continued geometrically (with the ratio of
/// its last two entries) until two successive extrapolants agree to 1e-12
/// relative, which keeps the estimate accurate when a branch point of the
/// roots lies close to `beta = 0`. Variants that do not depend on `beta`
/// return the exact value.
pub fn beta_limit(
    variant: Variant,
    params: &PlasmaParams,
    beta_sequence: &[f64],
    options: PencilOptions,
) -> Result<BetaLimit> {
    if beta_sequence.len() < 3 {
        return Err(invalid("beta sequence needs at least 3 values"));
    }
    if beta_sequence.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(invalid("beta sequence must be positive and finite"));
    }
    if beta_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("beta sequence must be strictly decreasing"));
    }
    let leading = |beta: f64| -> Result<(f64, f64)> {
        let p = params.with_beta(beta)?;
        let s = solve_pencil(&build_pencil_with(variant, &p, options)?)?;
        Ok((beta, s.max_re()))
    };
    let mut samples = beta_sequence
        .par_iter()
        .map(|&beta| leading(beta))
        .collect::<Result<Vec<_>>>()?;

    if !variant.depends_on_beta() {
        let limit = solve_pencil(&build_pencil_with(variant, params, options)?)?.max_re();
        return Ok(BetaLimit { limit, samples });
    }

    let n = samples.len();
    let ratio = samples[n - 1].0 / samples[n - 2].0;
    let mut limit = lagrange_at_zero(&samples[n - 3..]);
    for _ in 0..MAX_BETA_REFINEMENTS {
        let beta = samples[samples.len() - 1].0 * ratio;
        if beta < f64::MIN_POSITIVE {
            break;
        }
        samples.push(leading(beta)?);
        let next = lagrange_at_zero(&samples[samples.len() - 3..]);
        let settled = (next - limit).abs() <= 1e-12 * (1.0 + next.abs());
        limit = next;
        if settled {
            break;
        }
    }
    Ok(BetaLimit { limit, samples })
}

fn lagrange_at_zero(points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .enumerate()
        .map(|(i, &(xi, yi))| {
            let weight: f64 = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &(xj, _))| xj / (xj - xi))
                .product();
            yi * weight
        })
        .sum()
}

/// JSON view of a classified spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub variant: Variant,
    pub polynomial: PolynomialKind,
    pub roots: [RootJson; 2],
    pub regime: Regime,
    pub anosov: bool,
    pub params: PlasmaParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_limit: Option<f64>,
    pub notes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for RootJson {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl SpectrumReport {
    pub fn new(spectrum: &Spectrum, class: &DynamoClass, beta_limit: Option<f64>) -> Self {
        Self {
            variant: spectrum.variant,
            polynomial: spectrum.polynomial,
            roots: spectrum.roots.map(RootJson::from),
            regime: class.regime,
            anosov: class.anosov,
            params: spectrum.params,
            beta_limit,
            notes: class.notes.clone(),
        }
    }
}

/// Solves and classifies in one go, estimating the `beta -> 0` limit when needed.
pub fn analyze(
    polynomial: PolynomialKind,
    variant: Variant,
    params: &PlasmaParams,
    options: PencilOptions,
) -> Result<(Spectrum, DynamoClass, Option<f64>)> {
    let spectrum = spectrum_for(polynomial, variant, params, options)?;
    let limit = if spectrum.depends_on_beta() {
        Some(beta_limit(variant, params, &DEFAULT_BETA_SEQUENCE, options)?.limit)
    } else {
        None
    };
    let class = classify(&spectrum, limit)?;
    Ok((spectrum, class, limit))
}
