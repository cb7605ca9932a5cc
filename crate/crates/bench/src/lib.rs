//! Fixtures shared by the benchmarks.

use dynamo_spectra::{build_pencil, PlasmaParams, SpectralPencil, Variant};

/// One pencil of each variant at moderate parameters.
pub fn sample_pencils() -> Vec<SpectralPencil> {
    let params = PlasmaParams::from_product(-1.0, 0.1, -1.0, 1.0).expect("finite parameters");
    Variant::ALL
        .iter()
        .map(|v| build_pencil(*v, &params).expect("valid pencil"))
        .collect()
}
