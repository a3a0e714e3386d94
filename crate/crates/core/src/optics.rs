//! Shift-invariant wavefront optics.
//!
//! The exit pupil is a unit disc carrying a Zernike wavefront `W(ρ, θ)` in
//! micrometres of optical path. The PSF is `|FT(P)|²` and the OTF its
//! Fourier transform. With the pupil sampled `n` samples across and
//! zero-padded to `2n`, PSF samples are `λN/2` apart and the OTF grid spans
//! `±f_c` with `f_c = 1/(λN)` at index `n`.
//!
//! [`radiance_to_irradiance`] applies the camera equation
//! `E = L·π/(4N²)`, per-wavelength blur and radial relative illumination.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::cube::{IrradianceCube, RadianceCube};
use crate::error::{Error, Result};
use crate::fft::fft2;
use crate::radiometry::{expect_unit, SpectralUnit};

/// Blur applied in [`radiance_to_irradiance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsfMode {
    #[default]
    Wavefront,
    /// Identity kernel; isolates the radiometric factors.
    Delta,
}

/// `RI(r) = 1 + a2·r² + a4·r⁴`, `r` = image height over the half-diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeIllumination {
    pub a2: f64,
    pub a4: f64,
}

impl RelativeIllumination {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        1.0 + self.a2 * r2 + self.a4 * r2 * r2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsConfig {
    pub focal_length_mm: f64,
    pub f_number: f64,
    /// ANSI single-index Zernike coefficients in µm.
    pub zernike_um: BTreeMap<usize, f64>,
    pub relative_illumination: RelativeIllumination,
    /// Pupil samples across the disc diameter.
    pub pupil_grid_size: usize,
    pub psf_mode: PsfMode,
    /// Irradiance samples per sensor pixel along each axis; the input cube
    /// is rendered at this factor and binned down after blurring.
    pub binning: usize,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            focal_length_mm: 4.38,
            f_number: 1.73,
            zernike_um: BTreeMap::new(),
            relative_illumination: RelativeIllumination::default(),
            pupil_grid_size: 512,
            psf_mode: PsfMode::Wavefront,
            binning: 1,
        }
    }
}

impl OpticsConfig {
    pub fn with_defocus(mut self, c4_um: f64) -> Self {
        self.zernike_um.insert(4, c4_um);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length_mm.is_finite() && self.focal_length_mm > 0.0) {
            return Err(Error::Config("focal_length_mm must be > 0".into()));
        }
        if !(self.f_number.is_finite() && self.f_number > 0.0) {
            return Err(Error::Config("f_number must be > 0".into()));
        }
        if self.pupil_grid_size < 64 {
            return Err(Error::Config(format!(
                "pupil_grid_size {} must be ≥ 64",
                self.pupil_grid_size
            )));
        }
        if self.binning == 0 {
            return Err(Error::Config("binning must be ≥ 1".into()));
        }
        for (&j, c) in &self.zernike_um {
            if !matches!(j, 0 | 4) {
                return Err(Error::UnsupportedZernike(j));
            }
            if !c.is_finite() {
                return Err(Error::Config(format!("Zernike c{j} is not finite")));
            }
        }
        let ri = &self.relative_illumination;
        for i in 0..=100 {
            let v = ri.eval(i as f64 / 100.0);
            if !(v > 0.0 && v <= 1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "relative illumination {v:.4} at r = {:.2} is outside (0, 1]",
                    i as f64 / 100.0
                )));
            }
        }
        Ok(())
    }

    /// `π/(4N²)`.
    pub fn camera_factor(&self) -> f64 {
        PI / (4.0 * self.f_number * self.f_number)
    }

    /// Incoherent cutoff `1/(λN)` in cycles per µm.
    pub fn cutoff_per_um(&self, wavelength_nm: f64) -> f64 {
        1.0 / (wavelength_nm * 1e-3 * self.f_number)
    }

    /// Wavefront in µm at normalized pupil radius `rho`.
    fn wavefront(&self, rho: f64) -> f64 {
        let mut w = 0.0;
        for (&j, &c) in &self.zernike_um {
            w += c * match j {
                0 => 1.0,
                4 => 3f64.sqrt() * (2.0 * rho * rho - 1.0),
                _ => 0.0,
            };
        }
        w
    }
}

/// Row-major square complex field.
#[derive(Debug, Clone)]
pub struct Pupil {
    pub size: usize,
    pub data: Vec<Complex64>,
}

impl Pupil {
    /// Radial coordinate of sample `(i, j)` for a disc `diameter` samples
    /// across, centred on the grid.
    fn rho(i: usize, size: usize, diameter: f64) -> f64 {
        (i as f64 + 0.5 - 0.5 * size as f64) / (0.5 * diameter)
    }
}

/// `P = circ(ρ)·exp(i·2π·W/λ)` on a `pupil_grid_size²` grid spanning the disc.
pub fn pupil_function(config: &OpticsConfig, wavelength_nm: f64) -> Result<Pupil> {
    config.validate()?;
    let n = config.pupil_grid_size;
    Ok(sample_pupil(config, wavelength_nm, n, n as f64))
}

/// Pupil on a `size²` grid with a disc `diameter` samples across.
fn sample_pupil(config: &OpticsConfig, wavelength_nm: f64, size: usize, diameter: f64) -> Pupil {
    let lambda_um = wavelength_nm * 1e-3;
    let mut data = vec![Complex64::default(); size * size];
    for (y, row) in data.chunks_exact_mut(size).enumerate() {
        let py = Pupil::rho(y, size, diameter);
        for (x, v) in row.iter_mut().enumerate() {
            let px = Pupil::rho(x, size, diameter);
            let r2 = px * px + py * py;
            if r2 <= 1.0 {
                let phase = 2.0 * PI * config.wavefront(r2.sqrt()) / lambda_um;
                *v = Complex64::from_polar(1.0, phase);
            }
        }
    }
    Pupil { size, data }
}

/// RMS of the wavefront over the disc (µm), from the sampled pupil phase.
pub fn wavefront_rms(config: &OpticsConfig) -> Result<f64> {
    config.validate()?;
    let n = config.pupil_grid_size;
    let (mut s, mut s2, mut k) = (0.0, 0.0, 0usize);
    for y in 0..n {
        let py = Pupil::rho(y, n, n as f64);
        for x in 0..n {
            let px = Pupil::rho(x, n, n as f64);
            let r2 = px * px + py * py;
            if r2 <= 1.0 {
                let w = config.wavefront(r2.sqrt());
                s += w;
                s2 += w * w;
                k += 1;
            }
        }
    }
    let m = s / k as f64;
    Ok((s2 / k as f64 - m * m).max(0.0).sqrt())
}

/// Sampled point-spread function, centred at `(size/2, size/2)`.
#[derive(Debug, Clone)]
pub struct Psf {
    pub size: usize,
    /// Sample spacing at the image plane (µm).
    pub spacing_um: f64,
    /// Unit-sum, row-major.
    pub data: Vec<f64>,
}

/// Optical transfer function on the DFT grid of a [`Psf`], zero frequency at
/// `(size/2, size/2)`.
#[derive(Debug, Clone)]
pub struct Otf {
    pub size: usize,
    /// Frequency step in cycles/µm.
    pub df_per_um: f64,
    pub data: Vec<Complex64>,
}

impl Otf {
    /// Value at integer frequency offsets from DC.
    pub fn at(&self, kx: i64, ky: i64) -> Complex64 {
        let c = (self.size / 2) as i64;
        let (x, y) = (c + kx, c + ky);
        if x < 0 || y < 0 || x >= self.size as i64 || y >= self.size as i64 {
            return Complex64::default();
        }
        self.data[y as usize * self.size + x as usize]
    }

    /// `|OTF|` along +fx at `f` cycles/µm, linearly interpolated.
    pub fn mtf_x(&self, f_per_um: f64) -> f64 {
        let t = f_per_um / self.df_per_um;
        let k = t.floor();
        let frac = t - k;
        let a = self.at(k as i64, 0).norm();
        let b = self.at(k as i64 + 1, 0).norm();
        a * (1.0 - frac) + b * frac
    }
}

fn psf_from_pupil(pupil: &Pupil) -> Vec<f64> {
    let n = pupil.size;
    let m = 2 * n;
    let mut field = vec![Complex64::default(); m * m];
    for y in 0..n {
        field[y * m..y * m + n].copy_from_slice(&pupil.data[y * n..(y + 1) * n]);
    }
    fft2(&mut field, m, m, FftDirection::Forward);
    let mut psf = vec![0.0; m * m];
    // fftshift while taking |·|².
    let h = m / 2;
    for y in 0..m {
        for x in 0..m {
            psf[((y + h) % m) * m + (x + h) % m] = field[y * m + x].norm_sqr();
        }
    }
    let total: f64 = psf.iter().sum();
    psf.iter_mut().for_each(|v| *v /= total);
    psf
}

/// PSF on the standard grid (`2·pupil_grid_size` samples, `λN/2` apart).
pub fn psf(config: &OpticsConfig, wavelength_nm: f64) -> Result<Psf> {
    let pupil = pupil_function(config, wavelength_nm)?;
    Ok(Psf {
        size: 2 * pupil.size,
        spacing_um: 0.5 * wavelength_nm * 1e-3 * config.f_number,
        data: psf_from_pupil(&pupil),
    })
}

/// OTF = FT(PSF), normalized to 1 at zero frequency.
pub fn otf(config: &OpticsConfig, wavelength_nm: f64) -> Result<Otf> {
    Ok(otf_from_psf(&psf(config, wavelength_nm)?))
}

pub fn otf_from_psf(p: &Psf) -> Otf {
    let m = p.size;
    let h = m / 2;
    // ifftshift so the PSF centre sits at the origin; the transform is then
    // real for a symmetric PSF.
    let mut field = vec![Complex64::default(); m * m];
    for y in 0..m {
        for x in 0..m {
            field[y * m + x] = Complex64::new(p.data[((y + h) % m) * m + (x + h) % m], 0.0);
        }
    }
    fft2(&mut field, m, m, FftDirection::Forward);
    let dc = field[0];
    let mut data = vec![Complex64::default(); m * m];
    for y in 0..m {
        for x in 0..m {
            data[((y + h) % m) * m + (x + h) % m] = field[y * m + x] / dc;
        }
    }
    Otf {
        size: m,
        df_per_um: 1.0 / (m as f64 * p.spacing_um),
        data,
    }
}

/// Analytic diffraction-limited MTF of a circular pupil at `f̂ = f/f_c`.
pub fn diffraction_mtf(f_hat: f64) -> f64 {
    if f_hat >= 1.0 {
        return 0.0;
    }
    let f = f_hat.abs();
    2.0 / PI * (f.acos() - f * (1.0 - f * f).sqrt())
}

/// Defocus coefficient `c₄` (µm) for an object at `object_m` when the lens
/// is focused at `focus_m`, from the thin-lens image shift
/// `Δz`, `W020 = Δz/(8N²)` and `c₄ = W020/(2√3)`.
pub fn defocus_coefficient(focal_length_mm: f64, f_number: f64, focus_m: f64, object_m: f64) -> Result<f64> {
    if !(focal_length_mm > 0.0 && f_number > 0.0) {
        return Err(Error::Config("focal length and f-number must be > 0".into()));
    }
    let f = focal_length_mm * 1e-3;
    for (name, d) in [("focus", focus_m), ("object", object_m)] {
        if !(d.is_finite() && d > f) {
            return Err(Error::Config(format!(
                "{name} distance {d} m must exceed the focal length {f} m"
            )));
        }
    }
    let image = |d: f64| 1.0 / (1.0 / f - 1.0 / d);
    let dz_um = (image(object_m) - image(focus_m)).abs() * 1e6;
    let w020 = dz_um / (8.0 * f_number * f_number);
    Ok(w020 / (2.0 * 3f64.sqrt()))
}

/// Blur kernel point-sampled at `pitch_um`, cropped to hold ~99.5 % of the
/// energy and renormalized to unit sum. Returned as `(half_width, data)` for
/// a `(2r+1)²` kernel.
pub fn sampled_kernel(config: &OpticsConfig, wavelength_nm: f64, pitch_um: f64) -> Result<(usize, Vec<f64>)> {
    config.validate()?;
    if config.psf_mode == PsfMode::Delta {
        return Ok((0, vec![1.0]));
    }
    let nyquist = 0.5 * wavelength_nm * 1e-3 * config.f_number;
    // Fine spacing pitch/q, at or below the PSF's Nyquist step, so decimating
    // by q lands exactly on the target pitch.
    let q = (pitch_um / nyquist).ceil().max(1.0) as usize;
    let fine = pitch_um / q as f64;
    let m = 2 * config.pupil_grid_size;
    let diameter = m as f64 * fine / (2.0 * nyquist);
    let pupil = sample_pupil(config, wavelength_nm, config.pupil_grid_size, diameter);
    let full = psf_from_pupil(&pupil);

    let c = m / 2;
    let half = c / q;
    let side = 2 * half + 1;
    let mut k = vec![0.0; side * side];
    for j in 0..side {
        let y = c + j * q - half * q;
        for i in 0..side {
            let x = c + i * q - half * q;
            if x < m && y < m {
                k[j * side + i] = full[y * m + x];
            }
        }
    }
    // Smallest centred square holding 99.5 % of the sampled energy.
    let total: f64 = k.iter().sum();
    let mut r = 0;
    while r < half {
        let mut s = 0.0;
        for j in half - r..=half + r {
            s += k[j * side + half - r..=j * side + half + r].iter().sum::<f64>();
        }
        if s >= 0.995 * total {
            break;
        }
        r += 1;
    }
    let w = 2 * r + 1;
    let mut out = Vec::with_capacity(w * w);
    for j in half - r..=half + r {
        out.extend_from_slice(&k[j * side + half - r..=j * side + half + r]);
    }
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= s);
    Ok((r, out))
}

/// Convolve a row-major plane with a `(2r+1)²` kernel, clamping at edges.
pub fn convolve_clamped(plane: &[f64], width: usize, height: usize, r: usize, kernel: &[f64]) -> Vec<f64> {
    if r == 0 {
        return plane.iter().map(|v| v * kernel[0]).collect();
    }
    let (pw, ph) = (width + 2 * r, height + 2 * r);
    let mut img = vec![Complex64::default(); pw * ph];
    for y in 0..ph {
        let sy = (y as isize - r as isize).clamp(0, height as isize - 1) as usize;
        for x in 0..pw {
            let sx = (x as isize - r as isize).clamp(0, width as isize - 1) as usize;
            img[y * pw + x] = Complex64::new(plane[sy * width + sx], 0.0);
        }
    }
    // Kernel centred on the origin with wrap-around.
    let side = 2 * r + 1;
    let mut ker = vec![Complex64::default(); pw * ph];
    for j in 0..side {
        let y = (j + ph - r) % ph;
        for i in 0..side {
            let x = (i + pw - r) % pw;
            ker[y * pw + x].re += kernel[j * side + i];
        }
    }
    fft2(&mut img, pw, ph, FftDirection::Forward);
    fft2(&mut ker, pw, ph, FftDirection::Forward);
    for (a, b) in img.iter_mut().zip(&ker) {
        *a *= b;
    }
    fft2(&mut img, pw, ph, FftDirection::Inverse);
    let norm = 1.0 / (pw * ph) as f64;
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = (img[(y + r) * pw + x + r].re * norm).max(0.0);
        }
    }
    out
}

/// Average `factor × factor` blocks.
pub fn bin_plane(plane: &[f64], width: usize, height: usize, factor: usize) -> Vec<f64> {
    let (w, h) = (width / factor, height / factor);
    let mut out = vec![0.0; w * h];
    let inv = 1.0 / (factor * factor) as f64;
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for dy in 0..factor {
                let row = (y * factor + dy) * width + x * factor;
                s += plane[row..row + factor].iter().sum::<f64>();
            }
            out[y * w + x] = s * inv;
        }
    }
    out
}

/// Normalized radius of every pixel centre for a `width × height` image.
pub fn normalized_radius(x: usize, y: usize, width: usize, height: usize) -> f64 {
    let dx = x as f64 + 0.5 - 0.5 * width as f64;
    let dy = y as f64 + 0.5 - 0.5 * height as f64;
    let half_diag = 0.5 * ((width * width + height * height) as f64).sqrt();
    (dx * dx + dy * dy).sqrt() / half_diag
}

/// Scene radiance → sensor-plane irradiance.
///
/// The input cube is sampled `binning` times finer than the sensor; each
/// band is blurred at that pitch, binned, multiplied by `π/(4N²)` and by the
/// relative illumination.
pub fn radiance_to_irradiance(cube: &RadianceCube, config: &OpticsConfig) -> Result<IrradianceCube> {
    config.validate()?;
    expect_unit(cube.unit(), SpectralUnit::Radiance)?;
    let s = config.binning;
    let (w, h) = (cube.width(), cube.height());
    if w % s != 0 || h % s != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{w}×{h} cube is not a multiple of the {s}× binning"
        )));
    }
    let (ow, oh) = (w / s, h / s);
    let grid = *cube.grid();
    let pitch = cube.pitch_um();
    let factor = config.camera_factor();
    let ri: Vec<f64> = (0..ow * oh)
        .map(|p| {
            config
                .relative_illumination
                .eval(normalized_radius(p % ow, p / ow, ow, oh))
        })
        .collect();

    let planes: Vec<Result<Vec<f64>>> = (0..grid.count())
        .into_par_iter()
        .map(|b| {
            let plane = cube.plane(b);
            if plane.iter().all(|v| *v == 0.0) {
                return Ok(vec![0.0; ow * oh]);
            }
            let (r, k) = sampled_kernel(config, grid.wavelength(b), pitch)?;
            let blurred = convolve_clamped(plane, w, h, r, &k);
            let mut binned = if s == 1 { blurred } else { bin_plane(&blurred, w, h, s) };
            for (v, g) in binned.iter_mut().zip(&ri) {
                *v *= factor * g;
            }
            Ok(binned)
        })
        .collect();
    let mut data = Vec::with_capacity(ow * oh * grid.count());
    for p in planes {
        data.extend(p?);
    }
    IrradianceCube::from_planes(ow, oh, grid, SpectralUnit::Irradiance, pitch * s as f64, data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeIlluminationFit {
    pub coefficients: RelativeIllumination,
    /// RMS of `value/scale − RI(r)`.
    pub residual_rms: f64,
}

/// Fit `v ≈ s·(1 + a2·r² + a4·r⁴)` to a flat-field image by least squares.
pub fn fit_relative_illumination(image: &[f64], width: usize, height: usize) -> Result<RelativeIlluminationFit> {
    if image.len() != width * height || image.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for a {width}×{height} image",
            image.len()
        )));
    }
    let mut rows = Vec::with_capacity(image.len());
    for y in 0..height {
        for x in 0..width {
            let r2 = normalized_radius(x, y, width, height).powi(2);
            rows.push(vec![1.0, r2, r2 * r2]);
        }
    }
    let sol = crate::analysis::qe::least_squares(&rows, &[image.to_vec()])
        .map_err(|_| Error::Degenerate("flat field does not span enough distinct radii".into()))?;
    let [s, b2, b4] = [sol[0][0], sol[0][1], sol[0][2]];
    if !(s > 0.0) {
        return Err(Error::Degenerate("fitted centre value is not positive".into()));
    }
    let coefficients = RelativeIllumination { a2: b2 / s, a4: b4 / s };
    let ss: f64 = rows
        .iter()
        .zip(image)
        .map(|(row, v)| (v / s - coefficients.eval(row[1].sqrt())).powi(2))
        .sum();
    Ok(RelativeIlluminationFit {
        coefficients,
        residual_rms: (ss / image.len() as f64).sqrt(),
    })
}

/// `frequency_cyc_per_mm,mtf` rows along +fx up to the cutoff.
pub fn mtf_csv(otf: &Otf, cutoff_per_um: f64) -> String {
    let mut s = String::from("frequency_cyc_per_mm,mtf\n");
    let mut k = 0i64;
    loop {
        let f = k as f64 * otf.df_per_um;
        if f > cutoff_per_um * 1.0001 {
            break;
        }
        s.push_str(&format!("{},{}\n", f * 1e3, otf.at(k, 0).norm()));
        k += 1;
    }
    s
}

/// Central row of a PSF as `x_um,value`.
pub fn psf_csv(p: &Psf) -> String {
    let mut s = String::from("x_um,value\n");
    let c = p.size / 2;
    for x in 0..p.size {
        let pos = (x as f64 - c as f64) * p.spacing_um;
        s.push_str(&format!("{pos},{}\n", p.data[c * p.size + x]));
    }
    s
}
