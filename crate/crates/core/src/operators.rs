//! Plasma parameters, field components and the 2x2 growth-rate pencils
//! `M(gamma) = A + gamma C` of the filamentary induction equations.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

/// Flow and turbulence parameters of the filament.
///
/// Only the product `alpha * lambda_lyap` enters the pencils. It can be pinned
/// directly with [`PlasmaParams::with_alpha_lambda`], in which case the override
/// supersedes the product and is serialized alongside the raw factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaParams {
    pub alpha: f64,
    pub beta: f64,
    pub v_s: f64,
    #[serde(rename = "lambda")]
    pub lambda_lyap: f64,
    pub kappa0: f64,
    #[serde(
        default,
        rename = "alpha_lambda",
        skip_serializing_if = "Option::is_none"
    )]
    alpha_lambda_override: Option<f64>,
}

impl PlasmaParams {
    pub fn new(alpha: f64, beta: f64, v_s: f64, lambda_lyap: f64, kappa0: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            v_s,
            lambda_lyap,
            kappa0,
            alpha_lambda_override: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters given directly through the product `alpha_lambda`
    /// (stored as `alpha = alpha_lambda`, `lambda = 1` plus the override).
    pub fn from_product(alpha_lambda: f64, beta: f64, v_s: f64, kappa0: f64) -> Result<Self> {
        Self::new(alpha_lambda, beta, v_s, 1.0, kappa0)?.with_alpha_lambda(alpha_lambda)
    }

    pub fn with_alpha_lambda(mut self, alpha_lambda: f64) -> Result<Self> {
        ensure_finite("alpha_lambda", alpha_lambda)?;
        self.alpha_lambda_override = Some(alpha_lambda);
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn alpha_lambda(&self) -> f64 {
        self.alpha_lambda_override
            .unwrap_or(self.alpha * self.lambda_lyap)
    }

    pub fn alpha_lambda_overridden(&self) -> bool {
        self.alpha_lambda_override.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("alpha", self.alpha)?;
        ensure_finite("beta", self.beta)?;
        ensure_finite("v_s", self.v_s)?;
        ensure_finite("lambda", self.lambda_lyap)?;
        ensure_finite("kappa0", self.kappa0)?;
        if let Some(al) = self.alpha_lambda_override {
            ensure_finite("alpha_lambda", al)?;
        }
        if self.beta < 0.0 {
            return Err(invalid(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Which printed operator matrix a pencil encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Full turbulent operator with helicity and diffusivity.
    GeneralBeta,
    /// `beta = 0`.
    Laminar,
    /// `alpha lambda = 0` with diffusivity kept.
    ZeroHelicityTurbulent,
    /// Both `beta` and `alpha lambda` vanish.
    OscillatoryLimit,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::GeneralBeta,
        Variant::Laminar,
        Variant::ZeroHelicityTurbulent,
        Variant::OscillatoryLimit,
    ];

    /// Whether the pencil entries depend on `beta`.
    pub fn depends_on_beta(self) -> bool {
        matches!(self, Variant::GeneralBeta | Variant::ZeroHelicityTurbulent)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::GeneralBeta => "general_beta",
            Variant::Laminar => "laminar",
            Variant::ZeroHelicityTurbulent => "zero_helicity_turbulent",
            Variant::OscillatoryLimit => "oscillatory_limit",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "general_beta" | "general" | "turbulent" => Ok(Variant::GeneralBeta),
            "laminar" => Ok(Variant::Laminar),
            "zero_helicity_turbulent" | "zero_helicity" => Ok(Variant::ZeroHelicityTurbulent),
            "oscillatory_limit" | "oscillatory" => Ok(Variant::OscillatoryLimit),
            other => Err(invalid(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilOptions {
    /// Replace the printed `beta kappa0^4` entry by `beta kappa0^2`.
    pub assume_kappa4_typo: bool,
}

/// Affine matrix pencil `M(gamma) = A + gamma C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPencil {
    pub a: Matrix2<f64>,
    pub c: Matrix2<f64>,
    pub variant: Variant,
    pub params: PlasmaParams,
    pub options: PencilOptions,
}

impl SpectralPencil {
    /// `A + gamma C` for a real `gamma`.
    pub fn at(&self, gamma: f64) -> Matrix2<f64> {
        self.a + self.c * gamma
    }

    pub fn det_c(&self) -> f64 {
        self.c.determinant()
    }

    pub fn a_row_major(&self) -> [f64; 4] {
        row_major(&self.a)
    }

    pub fn c_row_major(&self) -> [f64; 4] {
        row_major(&self.c)
    }
}

pub(crate) fn row_major(m: &Matrix2<f64>) -> [f64; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

#[derive(Serialize, Deserialize)]
struct PencilJson {
    variant: Variant,
    #[serde(rename = "A")]
    a: [f64; 4],
    #[serde(rename = "C")]
    c: [f64; 4],
    params: PlasmaParams,
    #[serde(default, skip_serializing_if = "is_default")]
    options: PencilOptions,
}

fn is_default(o: &PencilOptions) -> bool {
    *o == PencilOptions::default()
}

impl Serialize for SpectralPencil {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PencilJson {
            variant: self.variant,
            a: self.a_row_major(),
            c: self.c_row_major(),
            params: self.params,
            options: self.options,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralPencil {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PencilJson::deserialize(d)?;
        j.params.validate().map_err(serde::de::Error::custom)?;
        Ok(SpectralPencil {
            a: Matrix2::new(j.a[0], j.a[1], j.a[2], j.a[3]),
            c: Matrix2::new(j.c[0], j.c[1], j.c[2], j.c[3]),
            variant: j.variant,
            params: j.params,
            options: j.options,
        })
    }
}

/// Builds the pencil for `variant` with the printed entries.
///
/// `LAMINAR` ignores `beta`, `ZERO_HELICITY_TURBULENT` ignores `alpha lambda`
/// and `OSCILLATORY_LIMIT` ignores both. In every variant `C = diag(1, -1)`.
pub fn build_pencil(variant: Variant, params: &PlasmaParams) -> Result<SpectralPencil> {
    build_pencil_with(variant, params, PencilOptions::default())
}

pub fn build_pencil_with(
    variant: Variant,
    params: &PlasmaParams,
    options: PencilOptions,
) -> Result<SpectralPencil> {
    params.validate()?;
    let k = params.kappa0;
    let beta = params.beta;
    let al = params.alpha_lambda();
    let vs = params.v_s;
    let k4 = if options.assume_kappa4_typo {
        k * k
    } else {
        k * k * k * k
    };
    let a = match variant {
        Variant::GeneralBeta => {
            Matrix2::new(2.0 * beta * k * k - al, -k, -(al + k * vs), -(beta * k4))
        }
        Variant::Laminar => Matrix2::new(-al, -k, -(al + k * vs), 0.0),
        Variant::ZeroHelicityTurbulent => {
            Matrix2::new(2.0 * beta * k * k, -k, -(k * vs), -(beta * k4))
        }
        Variant::OscillatoryLimit => Matrix2::new(0.0, -k, -(k * vs), 0.0),
    };
    Ok(SpectralPencil {
        a,
        c: Matrix2::new(1.0, 0.0, 0.0, -1.0),
        variant,
        params: *params,
        options,
    })
}

/// Coefficients `(c2, c1, c0)` of a quadratic `c2 gamma^2 + c1 gamma + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoeffs {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl QuadraticCoeffs {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Self { c2, c1, c0 }
    }

    /// Divides through by `c2` so the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        Self::new(1.0, self.c1 / self.c2, self.c0 / self.c2)
    }

    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.c2, self.c1, self.c0)
    }
}

/// Exact expansion of `det(A + gamma C)`.
pub fn characteristic_coeffs(pencil: &SpectralPencil) -> QuadraticCoeffs {
    let (a, c) = (&pencil.a, &pencil.c);
    let c2 = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)];
    let c1 = a[(0, 0)] * c[(1, 1)] + c[(0, 0)] * a[(1, 1)]
        - a[(0, 1)] * c[(1, 0)]
        - c[(0, 1)] * a[(1, 0)];
    let c0 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    QuadraticCoeffs::new(c2, c1, c0)
}

/// The second-order polynomial as printed for the laminar case:
/// `gamma^2 + (alpha lambda) gamma - (alpha lambda + kappa0) kappa0`.
pub fn printed_polynomial_eq18(params: &PlasmaParams) -> Result<QuadraticCoeffs> {
    params.validate()?;
    let al = params.alpha_lambda();
    let k = params.kappa0;
    Ok(QuadraticCoeffs::new(1.0, al, -(al + k) * k))
}

/// Normal and binormal magnetic field components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldComponents {
    pub b_n: f64,
    pub b_b: f64,
}

impl FieldComponents {
    pub fn new(b_n: f64, b_b: f64) -> Result<Self> {
        ensure_finite("B_n", b_n)?;
        ensure_finite("B_b", b_b)?;
        Ok(Self { b_n, b_b })
    }

    pub fn is_equipartition(&self) -> bool {
        self.b_n == self.b_b
    }

    pub fn magnitude(&self) -> f64 {
        self.b_n.hypot(self.b_b)
    }
}

/// `d_s B_b - kappa0 B_n` for components constant along the filament, i.e. `-kappa0 B_n`.
pub fn divergence_residual(fields: &FieldComponents, kappa0: f64) -> f64 {
    let ds_bb = 0.0;
    ds_bb - kappa0 * fields.b_n
}

/// Flow speed selected by `B_n v_s = -B_b`.
pub fn equipartition_flow_constraint(fields: &FieldComponents) -> Result<f64> {
    if fields.b_n == 0.0 {
        return Err(Error::DegenerateConstraint(
            "B_n = 0 leaves v_s undetermined".into(),
        ));
    }
    Ok(-fields.b_b / fields.b_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(al: f64, beta: f64, vs: f64, k: f64) -> PlasmaParams {
        PlasmaParams::from_product(al, beta, vs, k).unwrap()
    }

    #[test]
    fn laminar_example() {
        let p = build_pencil(Variant::Laminar, &product(-1.0, 0.7, -1.0, 1.0)).unwrap();
        assert_eq!(p.a, Matrix2::new(1.0, -1.0, 2.0, 0.0));
        assert_eq!(p.c, Matrix2::new(1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn oscillatory_flat() {
        let p = build_pencil(Variant::OscillatoryLimit, &product(3.0, 2.0, 17.0, 0.0)).unwrap();
        assert_eq!(p.a, Matrix2::zeros());
        assert_eq!(p.det_c(), -1.0);
    }

    #[test]
    fn zero_helicity_example() {
        let p = build_pencil(
            Variant::ZeroHelicityTurbulent,
            &product(5.0, 0.1, -1.0, 1.0),
        )
        .unwrap();
        assert_eq!(p.a, Matrix2::new(0.2, -1.0, 1.0, -0.1));
    }

    #[test]
    fn kappa4_toggle() {
        let params = product(0.0, 1.0, 0.0, 2.0);
        let printed = build_pencil(Variant::GeneralBeta, &params).unwrap();
        let fixed = build_pencil_with(
            Variant::GeneralBeta,
            &params,
            PencilOptions {
                assume_kappa4_typo: true,
            },
        )
        .unwrap();
        assert_eq!(printed.a[(1, 1)], -16.0);
        assert_eq!(fixed.a[(1, 1)], -4.0);
    }

    #[test]
    fn pencil_reproduces_printed_matrix() {
        let params = PlasmaParams::new(0.4, 0.3, -0.8, 1.5, 1.2).unwrap();
        let (b, k, al, vs) = (0.3, 1.2, 0.4 * 1.5, -0.8);
        let p = build_pencil(Variant::GeneralBeta, &params).unwrap();
        let g = 0.37;
        let printed = Matrix2::new(
            g + 2.0 * b * k * k - al,
            -k,
            -(al + k * vs),
            -(g + b * k * k * k * k),
        );
        assert!((p.at(g) - printed).amax() < 1e-15);
    }

    #[test]
    fn unknown_variant() {
        assert!("spherical".parse::<Variant>().is_err());
        assert_eq!(
            "oscillatory".parse::<Variant>().unwrap(),
            Variant::OscillatoryLimit
        );
        assert_eq!(
            "zero-helicity-turbulent".parse::<Variant>().unwrap(),
            Variant::ZeroHelicityTurbulent
        );
    }

    #[test]
    fn params_validation() {
        assert!(PlasmaParams::new(1.0, -0.1, 0.0, 1.0, 1.0).is_err());
        assert!(PlasmaParams::new(f64::NAN, 0.0, 0.0, 1.0, 1.0).is_err());
        let p = PlasmaParams::new(2.0, 0.0, -1.0, -0.5, 1.0).unwrap();
        assert_eq!(p.alpha_lambda(), -1.0);
        assert!(!p.alpha_lambda_overridden());
        let q = p.with_alpha_lambda(3.0).unwrap();
        assert_eq!(q.alpha_lambda(), 3.0);
        assert!(q.alpha_lambda_overridden());
    }

    #[test]
    fn characteristic_examples() {
        let lam = build_pencil(Variant::Laminar, &product(-1.0, 0.0, -1.0, 1.0)).unwrap();
        assert_eq!(characteristic_coeffs(&lam).as_tuple(), (-1.0, -1.0, 2.0));
        assert_eq!(
            characteristic_coeffs(&lam).monic().as_tuple(),
            (1.0, 1.0, -2.0)
        );

        let osc = build_pencil(Variant::OscillatoryLimit, &product(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(
            characteristic_coeffs(&osc).monic().as_tuple(),
            (1.0, 0.0, 1.0)
        );

        for v in Variant::ALL {
            let p = build_pencil(v, &product(0.0, 0.0, 0.3, 0.0)).unwrap();
            let m = characteristic_coeffs(&p).monic();
            assert_eq!((m.c2, m.c1, m.c0), (1.0, 0.0, 0.0), "{v}");
        }
    }

    #[test]
    fn printed_polynomial_examples() {
        assert_eq!(
            printed_polynomial_eq18(&product(-1.0, 0.0, -1.0, 1.0))
                .unwrap()
                .as_tuple(),
            (1.0, -1.0, 0.0)
        );
        assert_eq!(
            printed_polynomial_eq18(&product(0.0, 0.0, -1.0, 0.0))
                .unwrap()
                .as_tuple(),
            (1.0, 0.0, 0.0)
        );
        assert_eq!(
            printed_polynomial_eq18(&product(-1.0, 0.0, -1.0, 0.0))
                .unwrap()
                .as_tuple(),
            (1.0, -1.0, 0.0)
        );
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(
            divergence_residual(&FieldComponents::new(2.0, 5.0).unwrap(), 0.0),
            0.0
        );
        assert_eq!(
            divergence_residual(&FieldComponents::new(0.0, 1.0).unwrap(), 3.0),
            0.0
        );
        assert_eq!(
            divergence_residual(&FieldComponents::new(2.0, 1.0).unwrap(), 1.0),
            -2.0
        );
    }

    #[test]
    fn flow_constraint_examples() {
        let f = |bn, bb| equipartition_flow_constraint(&FieldComponents::new(bn, bb).unwrap());
        assert_eq!(f(1.0, 1.0).unwrap(), -1.0);
        assert_eq!(f(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(f(2.0, 1.0).unwrap(), -0.5);
        assert!(matches!(f(0.0, 1.0), Err(Error::DegenerateConstraint(_))));
        assert!(FieldComponents::new(3.0, 3.0).unwrap().is_equipartition());
    }

    #[test]
    fn pencil_json_shape() {
        let p = build_pencil(Variant::Laminar, &product(-1.0, 0.0, -1.0, 1.0)).unwrap();
        let v = serde_json::to_value(p).unwrap();
        assert_eq!(v["variant"], "laminar");
        assert_eq!(v["A"], serde_json::json!([1.0, -1.0, 2.0, 0.0]));
        assert_eq!(v["C"], serde_json::json!([1.0, 0.0, 0.0, -1.0]));
        for key in ["alpha", "beta", "v_s", "lambda", "kappa0"] {
            assert!(v["params"].get(key).is_some(), "{key}");
        }
        let back: SpectralPencil = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
