//! ISO 12233 slanted-edge SFR.
//!
//! Steps: per-row edge location from the centroid of the row derivative, a
//! linear fit through those locations, projection of every pixel onto the
//! edge normal, binning into `1/oversample`-pixel bins (the ESF), a two-tap
//! derivative (the LSF), a Hamming window centred on the LSF and a DFT
//! normalized at zero frequency.
//!
//! The binning and the two-tap derivative each multiply the spectrum by
//! `sinc(f/oversample)`; both are divided out, with the correction capped
//! at 10.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const DEFAULT_OVERSAMPLE: usize = 4;
const MAX_CORRECTION: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MtfCurve {
    /// Cycles per pixel, measured along the edge normal.
    pub frequencies: Vec<f64>,
    pub modulation: Vec<f64>,
    /// Edge angle from the sampling axis it runs along, in degrees.
    pub edge_angle_deg: f64,
}

impl MtfCurve {
    /// Linear interpolation at `f` cycles/pixel.
    pub fn at(&self, f: f64) -> f64 {
        let i = self.frequencies.partition_point(|&x| x <= f);
        if i == 0 {
            return self.modulation[0];
        }
        if i >= self.frequencies.len() {
            return *self.modulation.last().expect("non-empty curve");
        }
        let (f0, f1) = (self.frequencies[i - 1], self.frequencies[i]);
        let t = (f - f0) / (f1 - f0);
        self.modulation[i - 1] * (1.0 - t) + self.modulation[i] * t
    }

    /// Frequencies in cycles/mm for a pixel pitch in µm.
    pub fn cycles_per_mm(&self, pitch_um: f64) -> Vec<f64> {
        self.frequencies.iter().map(|f| f * 1000.0 / pitch_um).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("frequency,modulation\n");
        for (f, m) in self.frequencies.iter().zip(&self.modulation) {
            s.push_str(&format!("{f},{m}\n"));
        }
        s
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Signed-derivative centroid of `row`, polarity already applied. `window`
/// restricts the centroid to `[lo, hi)` derivative taps with Hamming
/// weighting around `centre`.
fn row_centroid(row: &[f64], polarity: f64, window: Option<(f64, f64)>) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for x in 0..row.len() - 1 {
        let pos = x as f64 + 1.0;
        let mut d = polarity * (row[x + 1] - row[x]);
        if let Some((centre, half)) = window {
            let t = (pos - centre) / half;
            if t.abs() > 1.0 {
                continue;
            }
            d *= 0.54 + 0.46 * (PI * t).cos();
        }
        num += pos * d;
        den += d;
    }
    (den > 0.0).then(|| num / den)
}

fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let my = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = points.iter().map(|p| p.1).sum::<f64>() / n;
    let syy: f64 = points.iter().map(|p| (p.0 - my).powi(2)).sum();
    if syy == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - my) * (p.1 - mx)).sum();
    let slope = sxy / syy;
    Some((mx - slope * my, slope))
}

/// Edge geometry found by [`locate_edge`]: `x = intercept + slope · y` in
/// the (possibly transposed) frame, pixel centres at half-integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFit {
    pub transposed: bool,
    pub polarity: f64,
    pub intercept: f64,
    pub slope: f64,
}

impl EdgeFit {
    pub fn angle_deg(&self) -> f64 {
        self.slope.atan().to_degrees()
    }
}

fn check_region(region: &[f64], width: usize, height: usize) -> Result<()> {
    if region.len() != width * height {
        return Err(Error::DimensionMismatch(format!(
            "{} values for a {width}×{height} region",
            region.len()
        )));
    }
    if width < 8 || height < 8 {
        return Err(Error::EdgeDetection(format!("region {width}×{height} is too small")));
    }
    Ok(())
}

fn oriented(region: &[f64], width: usize, height: usize, transposed: bool) -> (Vec<f64>, usize, usize) {
    if transposed {
        let mut t = vec![0.0; region.len()];
        for y in 0..height {
            for x in 0..width {
                t[x * height + y] = region[y * width + x];
            }
        }
        (t, height, width)
    } else {
        (region.to_vec(), width, height)
    }
}

/// Finds the edge by per-row derivative centroids and a linear fit.
///
/// The edge may be near-vertical or near-horizontal (the region is then
/// transposed) and must be 2°–43° from the axis it runs along.
pub fn locate_edge(region: &[f64], width: usize, height: usize) -> Result<EdgeFit> {
    check_region(region, width, height)?;
    let (gx, gy) = gradient_energy(region, width, height);
    let transposed = gy > gx;
    let (data, w, h) = oriented(region, width, height, transposed);

    // Overall polarity from the mean horizontal step.
    let total: f64 = (0..h).map(|y| data[y * w + w - 1] - data[y * w]).sum::<f64>();
    let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(total.abs() > 1e-9 * scale.max(1e-300) * h as f64) || scale == 0.0 {
        return Err(Error::EdgeDetection(
            "no detectable edge: region has no left/right contrast".into(),
        ));
    }
    let polarity = total.signum();
    let rows: Vec<&[f64]> = data.chunks_exact(w).collect();

    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .enumerate()
        .filter_map(|(y, r)| row_centroid(r, polarity, None).map(|c| (y as f64 + 0.5, c)))
        .collect();
    if pts.len() < h / 2 || pts.len() < 4 {
        return Err(Error::EdgeDetection(format!(
            "edge found in only {} of {h} rows",
            pts.len()
        )));
    }
    let (mut a, mut b) = fit_line(&pts).ok_or_else(|| Error::EdgeDetection("edge fit failed".into()))?;
    // Refine with a window around the first fit.
    let half = (w as f64 / 4.0).clamp(4.0, 16.0);
    for _ in 0..2 {
        pts = rows
            .iter()
            .enumerate()
            .filter_map(|(y, r)| {
                let yc = y as f64 + 0.5;
                row_centroid(r, polarity, Some((a + b * yc, half))).map(|c| (yc, c))
            })
            .collect();
        if pts.len() < h / 2 || pts.len() < 4 {
            return Err(Error::EdgeDetection("edge lost during refinement".into()));
        }
        (a, b) = fit_line(&pts).ok_or_else(|| Error::EdgeDetection("edge fit failed".into()))?;
    }
    let fit = EdgeFit {
        transposed,
        polarity,
        intercept: a,
        slope: b,
    };
    let angle = fit.angle_deg();
    if !(2.0..=43.0).contains(&angle.abs()) {
        return Err(Error::EdgeDetection(format!("edge angle {angle:.2}° outside 2°–43°")));
    }
    Ok(fit)
}

/// Slanted-edge MTF of a single-channel `width × height` region.
pub fn slanted_edge_mtf(region: &[f64], width: usize, height: usize, oversample: usize) -> Result<MtfCurve> {
    let fit = locate_edge(region, width, height)?;
    slanted_edge_mtf_with_edge(region, width, height, oversample, &fit)
}

/// Slanted-edge MTF using an edge geometry found beforehand, for instance on
/// a sharper capture of the same target.
pub fn slanted_edge_mtf_with_edge(
    region: &[f64],
    width: usize,
    height: usize,
    oversample: usize,
    fit: &EdgeFit,
) -> Result<MtfCurve> {
    check_region(region, width, height)?;
    if oversample == 0 {
        return Err(Error::Config("oversample must be ≥ 1".into()));
    }
    let (data, w, h) = oriented(region, width, height, fit.transposed);
    let (a, b, polarity) = (fit.intercept, fit.slope, fit.polarity);
    let angle = fit.angle_deg();
    let cos = b.atan().cos();

    // ESF along the normal. Pixel centres sit at (x + 0.5, y + 0.5); the
    // centroid positions are in the same (edge-at-pixel-boundary) frame.
    let os = oversample as f64;
    // Keep a whole number of phase cycles so every sub-pixel offset is
    // equally represented; a partial cycle leaves a pixel-periodic ripple.
    let cycles = (h as f64 * b.abs()).floor();
    let h = if cycles >= 1.0 {
        ((cycles / b.abs()).round() as usize).clamp(1, h)
    } else {
        h
    };
    let mut dist = Vec::with_capacity(w * h);
    for y in 0..h {
        let edge = a + b * (y as f64 + 0.5);
        for x in 0..w {
            dist.push(((x as f64 + 0.5 - edge) * cos, data[y * w + x]));
        }
    }
    let dmin = dist.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
    let dmax = dist.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max);
    // Symmetric span around the edge, limited by the closer side.
    let span = dmin.abs().min(dmax.abs());
    let nbins = ((2.0 * span * os).floor() as usize).max(8);
    let start = -(nbins as f64) / (2.0 * os);
    let mut sum = vec![0.0; nbins];
    let mut pos = vec![0.0; nbins];
    let mut cnt = vec![0usize; nbins];
    for (d, v) in &dist {
        let i = ((d - start) * os).floor();
        if i >= 0.0 && (i as usize) < nbins {
            sum[i as usize] += v;
            pos[i as usize] += d;
            cnt[i as usize] += 1;
        }
    }
    // Each bin's mean sits at the mean offset of its samples, which wanders
    // with pixel phase; interpolating from there back onto the bin centres
    // keeps that wander out of the spectrum on steep (defocused) ramps.
    let known: Vec<(f64, f64)> = (0..nbins)
        .filter(|&i| cnt[i] > 0)
        .map(|i| (pos[i] / cnt[i] as f64, sum[i] / cnt[i] as f64))
        .collect();
    if known.is_empty() {
        return Err(Error::EdgeDetection("no samples near the edge".into()));
    }
    let esf: Vec<f64> = (0..nbins)
        .map(|i| interpolate(&known, start + (i as f64 + 0.5) / os))
        .collect();

    // Two-tap derivative, positive polarity.
    let n = nbins - 1;
    let mut lsf: Vec<f64> = (0..n).map(|i| polarity * (esf[i + 1] - esf[i])).collect();
    if lsf.iter().sum::<f64>() < 0.0 {
        lsf.iter_mut().for_each(|v| *v = -*v);
    }
    // Roll the centroid to the middle, then window.
    let lsum: f64 = lsf.iter().sum();
    let centroid = if lsum.abs() > 0.0 {
        lsf.iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() / lsum
    } else {
        n as f64 / 2.0
    };
    let shift = (n as f64 / 2.0 - centroid).round() as i64;
    let mut rolled = vec![0.0; n];
    for (i, v) in lsf.iter().enumerate() {
        rolled[((i as i64 + shift).rem_euclid(n as i64)) as usize] = *v;
    }
    let c = n as f64 / 2.0;
    let mut buf: Vec<Complex64> = rolled
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = (i as f64 - c) / n as f64;
            Complex64::new(v * (0.54 + 0.46 * (2.0 * PI * t).cos()), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dc = buf[0].norm();
    if !(dc > 0.0) {
        return Err(Error::EdgeDetection("line-spread function has zero area".into()));
    }
    let kmax = n / 2;
    let mut frequencies = Vec::with_capacity(kmax + 1);
    let mut modulation = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let f = k as f64 * os / n as f64;
        let corr = (1.0 / sinc(f / os).powi(2)).min(MAX_CORRECTION);
        frequencies.push(f);
        modulation.push(if k == 0 { 1.0 } else { buf[k].norm() / dc * corr });
    }
    Ok(MtfCurve {
        frequencies,
        modulation,
        edge_angle_deg: angle,
    })
}

fn gradient_energy(d: &[f64], w: usize, h: usize) -> (f64, f64) {
    let mut gx = 0.0;
    let mut gy = 0.0;
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                gx += (d[y * w + x + 1] - d[y * w + x]).abs();
            }
            if y + 1 < h {
                gy += (d[(y + 1) * w + x] - d[y * w + x]).abs();
            }
        }
    }
    (gx, gy)
}

/// Linear interpolation across empty bins; ends copy the nearest value.
/// Piecewise-linear through `points` (increasing x), constant outside.
fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let k = points.partition_point(|p| p.0 < x);
    if k == 0 {
        return points[0].1;
    }
    if k == points.len() {
        return points[k - 1].1;
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    if x1 > x0 {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    } else {
        y0
    }
}
