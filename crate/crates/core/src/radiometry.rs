//! Wavelength grids, sampled spectra and radiometric/photometric conversions.
//!
//! All spectra in the simulator live on a uniform [`WavelengthGrid`]. Spectral
//! integrals use the rectangle rule with `Δλ = step`; only [`luminance`] uses
//! trapezoid weights at the two grid endpoints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{PHOTOPIC_START_NM, PHOTOPIC_STEP_NM, PHOTOPIC_V};
use crate::error::{Error, Result};

/// Maximum luminous efficacy for photopic vision (lm/W).
pub const KM_PHOTOPIC: f64 = 683.0;
/// Planck constant (J·s), CODATA 2018 exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Uniformly spaced wavelength samples `start_nm + i·step_nm`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavelengthGrid {
    start_nm: f64,
    step_nm: f64,
    count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        if !(start_nm.is_finite() && start_nm > 0.0) {
            return Err(Error::InvalidGrid(format!("start {start_nm} nm must be > 0")));
        }
        if !(step_nm.is_finite() && step_nm > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step_nm} nm must be > 0")));
        }
        if count == 0 {
            return Err(Error::InvalidGrid("count must be ≥ 1".into()));
        }
        Ok(Self {
            start_nm,
            step_nm,
            count,
        })
    }

    /// 400–700 nm in 10 nm steps.
    pub fn visible() -> Self {
        Self {
            start_nm: 400.0,
            step_nm: 10.0,
            count: 31,
        }
    }

    pub fn start_nm(&self) -> f64 {
        self.start_nm
    }

    pub fn step_nm(&self) -> f64 {
        self.step_nm
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    #[inline]
    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + i as f64 * self.step_nm
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.wavelength(i))
    }

    /// Index of the sample nearest to `nm`, if within half a step of it.
    pub fn index_of(&self, nm: f64) -> Option<usize> {
        let t = (nm - self.start_nm) / self.step_nm;
        let i = t.round();
        if i < 0.0 || i as usize >= self.count || (t - i).abs() > 0.5 {
            return None;
        }
        Some(i as usize)
    }
}

impl Default for WavelengthGrid {
    fn default() -> Self {
        Self::visible()
    }
}

/// Physical quantity carried by a [`SpectralDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralUnit {
    /// W·sr⁻¹·m⁻²·nm⁻¹
    Radiance,
    /// W·m⁻²·nm⁻¹
    Irradiance,
    Reflectance,
    #[serde(rename = "qe")]
    QuantumEfficiency,
    /// W·nm⁻¹
    Power,
}

impl SpectralUnit {
    pub fn tag(&self) -> &'static str {
        match self {
            SpectralUnit::Radiance => "radiance",
            SpectralUnit::Irradiance => "irradiance",
            SpectralUnit::Reflectance => "reflectance",
            SpectralUnit::QuantumEfficiency => "qe",
            SpectralUnit::Power => "power",
        }
    }

    /// Unitless fractions bounded to [0, 1].
    pub fn is_fraction(&self) -> bool {
        matches!(self, SpectralUnit::Reflectance | SpectralUnit::QuantumEfficiency)
    }
}

impl fmt::Display for SpectralUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SpectralUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "radiance" => SpectralUnit::Radiance,
            "irradiance" => SpectralUnit::Irradiance,
            "reflectance" => SpectralUnit::Reflectance,
            "qe" => SpectralUnit::QuantumEfficiency,
            "power" => SpectralUnit::Power,
            other => return Err(Error::Format(format!("unknown unit tag `{other}`"))),
        })
    }
}

pub(crate) fn expect_unit(found: SpectralUnit, expected: SpectralUnit) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::UnitMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

/// A non-negative sampled function of wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    grid: WavelengthGrid,
    values: Vec<f64>,
    unit: SpectralUnit,
}

impl SpectralDistribution {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>, unit: SpectralUnit) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::InvalidSpectrum(format!(
                "{} values for a {}-sample grid",
                values.len(),
                grid.count()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "value {v} at {} nm is negative or not finite",
                    grid.wavelength(i)
                )));
            }
            if unit.is_fraction() && v > 1.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "{unit} out of range: {v} at {} nm",
                    grid.wavelength(i)
                )));
            }
        }
        Ok(Self { grid, values, unit })
    }

    pub fn constant(grid: WavelengthGrid, value: f64, unit: SpectralUnit) -> Result<Self> {
        Self::new(grid, vec![value; grid.count()], unit)
    }

    /// Sample `f(λ)` on every grid wavelength.
    pub fn from_fn(grid: WavelengthGrid, unit: SpectralUnit, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.wavelengths().map(f).collect(), unit)
    }

    pub fn zeros(grid: WavelengthGrid, unit: SpectralUnit) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.count()],
            unit,
        }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> SpectralUnit {
        self.unit
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same samples, new unit tag (validated).
    pub fn with_unit(self, unit: SpectralUnit) -> Result<Self> {
        Self::new(self.grid, self.values, unit)
    }

    /// Multiply every sample by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * factor).collect(), self.unit)
    }

    /// Linear interpolation at an arbitrary wavelength; zero outside support.
    pub fn value_at(&self, nm: f64) -> f64 {
        interpolate_uniform(&self.grid, &self.values, nm)
    }

    /// Resample onto `target` by linear interpolation (zero outside support).
    pub fn resample(&self, target: &WavelengthGrid) -> SpectralDistribution {
        if *target == self.grid {
            return self.clone();
        }
        let values = target.wavelengths().map(|nm| self.value_at(nm)).collect();
        SpectralDistribution {
            grid: *target,
            values,
            unit: self.unit,
        }
    }
}

fn interpolate_uniform(grid: &WavelengthGrid, values: &[f64], nm: f64) -> f64 {
    let eps = 1e-9 * grid.step_nm();
    let t = (nm - grid.start_nm()) / grid.step_nm();
    let last = (grid.count() - 1) as f64;
    if t < -eps / grid.step_nm() || t > last + eps / grid.step_nm() {
        return 0.0;
    }
    let t = t.clamp(0.0, last);
    let i = t.floor() as usize;
    if i + 1 >= grid.count() {
        return values[grid.count() - 1];
    }
    let frac = t - i as f64;
    if frac == 0.0 {
        return values[i];
    }
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Linear interpolation of irregular, strictly increasing samples; zero
/// outside `[first, last]`.
pub fn interpolate_samples(wavelengths: &[f64], values: &[f64], nm: f64) -> f64 {
    let n = wavelengths.len();
    if n == 0 || nm < wavelengths[0] || nm > wavelengths[n - 1] {
        return 0.0;
    }
    let hi = wavelengths.partition_point(|&w| w < nm);
    if hi < n && wavelengths[hi] == nm {
        return values[hi];
    }
    if hi == 0 {
        return values[0];
    }
    let (w0, w1) = (wavelengths[hi - 1], wavelengths[hi]);
    let frac = (nm - w0) / (w1 - w0);
    values[hi - 1] * (1.0 - frac) + values[hi] * frac
}

/// CIE 1924 photopic V(λ) resampled onto `grid`.
pub fn photopic_efficiency(grid: &WavelengthGrid) -> Vec<f64> {
    let table = WavelengthGrid {
        start_nm: PHOTOPIC_START_NM,
        step_nm: PHOTOPIC_STEP_NM,
        count: PHOTOPIC_V.len(),
    };
    grid.wavelengths()
        .map(|nm| interpolate_uniform(&table, &PHOTOPIC_V, nm))
        .collect()
}

/// Integration weights used for photometric sums: Δλ everywhere, Δλ/2 at
/// the two endpoints of a multi-sample grid.
pub fn trapezoid_weights(grid: &WavelengthGrid) -> Vec<f64> {
    let n = grid.count();
    let mut w = vec![grid.step_nm(); n];
    if n >= 2 {
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
    }
    w
}

/// Luminance in cd/m² of a spectral radiance: `683·Σ V(λ)·L(λ)·w(λ)`.
pub fn luminance(radiance: &SpectralDistribution) -> Result<f64> {
    expect_unit(radiance.unit(), SpectralUnit::Radiance)?;
    let weights = LuminanceWeights::new(radiance.grid());
    Ok(weights.apply(radiance.values()))
}

/// Precomputed `683·V(λ)·w(λ)` for repeated per-pixel luminance sums.
#[derive(Debug, Clone)]
pub struct LuminanceWeights {
    weights: Vec<f64>,
}

impl LuminanceWeights {
    pub fn new(grid: &WavelengthGrid) -> Self {
        let v = photopic_efficiency(grid);
        let w = trapezoid_weights(grid);
        Self {
            weights: v.iter().zip(&w).map(|(v, w)| KM_PHOTOPIC * v * w).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, radiance: &[f64]) -> f64 {
        radiance.iter().zip(&self.weights).map(|(l, w)| l * w).sum()
    }
}

/// `Σ a(λ)·b(λ)·Δλ` over a shared grid.
pub fn inner_product(a: &SpectralDistribution, b: &SpectralDistribution) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let step = a.grid().step_nm();
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>() * step)
}

/// Parse a `wavelength_nm,value` CSV and resample it onto `grid`.
///
/// Wavelengths must be strictly increasing. Samples need not be uniformly
/// spaced; values between samples are linearly interpolated and the spectrum
/// is zero outside the file's support.
pub fn parse_spectrum_csv(text: &str, unit: SpectralUnit, grid: &WavelengthGrid) -> Result<SpectralDistribution> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("wavelength_nm,value") => {}
        Some(other) => {
            return Err(Error::Format(format!(
                "expected header `wavelength_nm,value`, found `{other}`"
            )))
        }
        None => return Err(Error::Format("empty spectrum file".into())),
    }
    let mut wl = Vec::new();
    let mut vals = Vec::new();
    for (n, line) in lines.enumerate() {
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("line {}: expected two fields", n + 2)))?;
        let w: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("line {}: bad wavelength `{a}`", n + 2)))?;
        let v: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("line {}: bad value `{b}`", n + 2)))?;
        if let Some(&prev) = wl.last() {
            if w <= prev {
                return Err(Error::Format(format!(
                    "line {}: wavelengths not strictly increasing ({w} after {prev})",
                    n + 2
                )));
            }
        }
        wl.push(w);
        vals.push(v);
    }
    if wl.is_empty() {
        return Err(Error::Format("spectrum file has no samples".into()));
    }
    let values = grid
        .wavelengths()
        .map(|nm| interpolate_samples(&wl, &vals, nm))
        .collect();
    SpectralDistribution::new(*grid, values, unit)
}

pub fn write_spectrum_csv(s: &SpectralDistribution) -> String {
    let mut out = String::from("wavelength_nm,value\n");
    for (nm, v) in s.grid().wavelengths().zip(s.values()) {
        out.push_str(&format!("{nm},{v}\n"));
    }
    out
}

/// Photon energy `h·c/λ` in joules for a wavelength in nanometres.
pub fn photon_energy(nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (nm * 1e-9)
}
