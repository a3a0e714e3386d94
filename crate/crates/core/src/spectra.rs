//! Default spectra: wall paints and papers, the ceiling light, ColorChecker
//! patches and the RGB quantum-efficiency curves.
//!
//! Everything except the ColorChecker table is a smooth analytic stand-in for
//! a measured curve; replace them with CSV files for real work.

use crate::analysis::qe::QeTransform;
use crate::data::MCC_REFLECTANCE;
use crate::radiometry::{SpectralDistribution, SpectralUnit, WavelengthGrid};

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn gauss(nm: f64, center: f64, sigma: f64) -> f64 {
    (-0.5 * ((nm - center) / sigma).powi(2)).exp()
}

fn sampled(grid: &WavelengthGrid, unit: SpectralUnit, f: impl Fn(f64) -> f64) -> SpectralDistribution {
    SpectralDistribution::from_fn(*grid, unit, f).expect("default spectra are in range")
}

/// Matte white paint.
pub fn white_paint(grid: &WavelengthGrid) -> SpectralDistribution {
    sampled(grid, SpectralUnit::Reflectance, |nm| {
        0.62 + 0.18 * logistic((nm - 440.0) / 15.0)
    })
}

/// Red matte paper (left wall).
pub fn red_paper(grid: &WavelengthGrid) -> SpectralDistribution {
    sampled(grid, SpectralUnit::Reflectance, |nm| {
        0.05 + 0.70 * logistic((nm - 595.0) / 12.0)
    })
}

/// Green matte paper (right wall).
pub fn green_paper(grid: &WavelengthGrid) -> SpectralDistribution {
    sampled(grid, SpectralUnit::Reflectance, |nm| {
        0.06 + 0.42 * gauss(nm, 530.0, 32.0)
    })
}

pub fn black(grid: &WavelengthGrid) -> SpectralDistribution {
    SpectralDistribution::zeros(*grid, SpectralUnit::Reflectance)
}

pub fn flat_reflectance(grid: &WavelengthGrid, value: f64) -> SpectralDistribution {
    sampled(grid, SpectralUnit::Reflectance, |_| value)
}

/// Broadband white-LED–like emitter with a blue pump peak, as radiance
/// (W·sr⁻¹·m⁻²·nm⁻¹) leaving the diffuser.
pub fn light_spd(grid: &WavelengthGrid) -> SpectralDistribution {
    sampled(grid, SpectralUnit::Radiance, |nm| {
        1.0 * gauss(nm, 452.0, 11.0) + 0.72 * gauss(nm, 565.0, 55.0) + 0.15 * gauss(nm, 640.0, 40.0)
    })
}

/// One of the 24 ColorChecker patches (0-based, row-major from dark skin).
pub fn mcc_patch(grid: &WavelengthGrid, index: usize) -> SpectralDistribution {
    let table = WavelengthGrid::visible();
    SpectralDistribution::new(table, MCC_REFLECTANCE[index].to_vec(), SpectralUnit::Reflectance)
        .expect("bundled reflectances are in [0, 1]")
        .resample(grid)
}

/// RGB quantum-efficiency curves as a sensor datasheet would publish them.
pub fn published_qe(grid: &WavelengthGrid) -> [SpectralDistribution; 3] {
    let r = sampled(grid, SpectralUnit::QuantumEfficiency, |nm| {
        0.58 * gauss(nm, 605.0, 32.0) + 0.05 * gauss(nm, 530.0, 40.0) + 0.03 * logistic((nm - 650.0) / 20.0)
    });
    let g = sampled(grid, SpectralUnit::QuantumEfficiency, |nm| {
        0.62 * gauss(nm, 535.0, 38.0) + 0.04 * gauss(nm, 460.0, 25.0)
    });
    let b = sampled(grid, SpectralUnit::QuantumEfficiency, |nm| {
        0.55 * gauss(nm, 462.0, 30.0) + 0.04 * gauss(nm, 540.0, 35.0)
    });
    [r, g, b]
}

/// Published curves after the crosstalk/gain transform, the default for
/// simulation.
pub fn transformed_qe(grid: &WavelengthGrid) -> [SpectralDistribution; 3] {
    QeTransform::reference()
        .apply(&published_qe(grid))
        .expect("reference transform keeps QE in range")
}
