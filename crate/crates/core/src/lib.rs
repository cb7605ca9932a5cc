//! Growth-rate spectra of filamentary alpha-squared dynamos.
//!
//! The crate builds the 2x2 operator pencils `A + gamma C` of a plasma
//! filament described by its Frenet frame, solves them in closed form,
//! classifies the resulting dynamo regime and cross-checks the spectra
//! against a direct time integration. [`audit`] compares the computed
//! spectra with the published closed-form claims.
//!
//! ```
//! use dynamo_spectra::{build_pencil, classify, solve_pencil, PlasmaParams, Regime, Variant};
//!
//! let params = PlasmaParams::from_product(-1.0, 0.0, -1.0, 1.0)?; // alpha*lambda, beta, v_s, kappa0
//! let spectrum = solve_pencil(&build_pencil(Variant::Laminar, &params)?)?;
//! assert_eq!(spectrum.roots[0].re, 1.0);
//! assert_eq!(spectrum.roots[1].re, -2.0);
//! assert_eq!(classify(&spectrum, None)?.regime, Regime::Fast);
//! # Ok::<(), dynamo_spectra::Error>(())
//! ```

pub mod audit;
pub mod error;
pub mod evolution;
pub mod export;
pub mod geometry;
pub mod operators;
pub mod spectral;
pub mod sweep;

pub use audit::{audit_paper_claims, AuditTolerances, DiscrepancyReport, Status};
pub use error::{Error, Result};
pub use evolution::{
    fit_growth_rate, integrate, to_evolution_system, EvolutionSystem, FieldTrajectory, GrowthFit,
};
pub use geometry::{
    evolve_frame, frame_laplacian_residual, FilamentProfile, FrameCoefficients, FrenetFrame,
};
pub use operators::{
    build_pencil, build_pencil_with, characteristic_coeffs, divergence_residual,
    equipartition_flow_constraint, printed_polynomial_eq18, FieldComponents, PencilOptions,
    PlasmaParams, QuadraticCoeffs, SpectralPencil, Variant,
};
pub use spectral::{
    anosov_branch_check, beta_limit, classify, golden_polynomial_roots, solve_pencil, DynamoClass,
    PolynomialKind, Regime, Spectrum,
};
pub use sweep::{regime_map, run_sweep, Axis, AxisName, SweepGrid};

pub use nalgebra::{Matrix2, Vector3};
pub use num_complex::Complex64;
