//! Pixel signal chain: spectral irradiance → electrons → volts → DN.
//!
//! Per pixel, in this order:
//!
//! 1. pick the QE curve for the pixel's CFA colour;
//! 2. `n̄ = A·ff·t·Σ E(λ)·QE(λ)·λ/(h·c)·Δλ`;
//! 3. `n ~ Poisson(n̄)`, clipped to the well capacity;
//! 4. `v = n·cg·gain + dark·t + offset + N(0, read)`;
//! 5. `v ← clip(v·analog_gain + analog_offset, 0, swing)`;
//! 6. `DN = round(v/swing·(2^bits − 1))`.
//!
//! Fixed-pattern maps (per-pixel offset and gain) come from `pattern_seed`;
//! temporal noise is drawn from streams keyed on `(noise_seed, frame, x, y)`.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cube::IrradianceCube;
use crate::error::{Error, Result};
use crate::radiometry::{
    expect_unit, interpolate_samples, photon_energy, SpectralDistribution, SpectralUnit, WavelengthGrid,
};
use crate::rng::StreamRng;
use crate::spectra;

/// 2×2 Bayer layouts, named by the colours of the top-left 2×2 block in
/// raster order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CfaPattern {
    #[default]
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl CfaPattern {
    pub fn label(&self) -> &'static str {
        match self {
            CfaPattern::Rggb => "RGGB",
            CfaPattern::Bggr => "BGGR",
            CfaPattern::Grbg => "GRBG",
            CfaPattern::Gbrg => "GBRG",
        }
    }

    /// Channel index (0 = R, 1 = G, 2 = B) at pixel `(x, y)`.
    #[inline]
    pub fn channel(&self, x: usize, y: usize) -> usize {
        let layout: [usize; 4] = match self {
            CfaPattern::Rggb => [0, 1, 1, 2],
            CfaPattern::Bggr => [2, 1, 1, 0],
            CfaPattern::Grbg => [1, 0, 2, 1],
            CfaPattern::Gbrg => [1, 2, 0, 1],
        };
        layout[(y & 1) * 2 + (x & 1)]
    }
}

impl fmt::Display for CfaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CfaPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "RGGB" => CfaPattern::Rggb,
            "BGGR" => CfaPattern::Bggr,
            "GRBG" => CfaPattern::Grbg,
            "GBRG" => CfaPattern::Gbrg,
            _ => return Err(Error::Config(format!("unknown CFA pattern `{s}`"))),
        })
    }
}

impl Serialize for CfaPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for CfaPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// R, G, B quantum-efficiency curves.
#[derive(Debug, Clone, PartialEq)]
pub struct QeCurves(pub [SpectralDistribution; 3]);

impl QeCurves {
    pub fn transformed() -> Self {
        QeCurves(spectra::transformed_qe(&WavelengthGrid::visible()))
    }

    pub fn published() -> Self {
        QeCurves(spectra::published_qe(&WavelengthGrid::visible()))
    }

    /// Three identical curves, i.e. a monochrome sensor behind the CFA.
    pub fn uniform(curve: SpectralDistribution) -> Self {
        QeCurves([curve.clone(), curve.clone(), curve])
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum QeDoc {
    Named(String),
    Curves {
        r: Vec<[f64; 2]>,
        g: Vec<[f64; 2]>,
        b: Vec<[f64; 2]>,
    },
}

impl Serialize for QeCurves {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |c: &SpectralDistribution| -> Vec<[f64; 2]> {
            c.grid().wavelengths().zip(c.values()).map(|(w, v)| [w, *v]).collect()
        };
        QeDoc::Curves {
            r: pairs(&self.0[0]),
            g: pairs(&self.0[1]),
            b: pairs(&self.0[2]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QeCurves {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match QeDoc::deserialize(d)? {
            QeDoc::Named(n) => match n.as_str() {
                "transformed" => Ok(QeCurves::transformed()),
                "published" => Ok(QeCurves::published()),
                other => Err(D::Error::custom(format!(
                    "unknown QE set `{other}` (expected transformed or published)"
                ))),
            },
            QeDoc::Curves { r, g, b } => {
                let grid = WavelengthGrid::visible();
                let curve = |name: &str, pts: &[[f64; 2]]| -> std::result::Result<SpectralDistribution, D::Error> {
                    let (wl, v): (Vec<f64>, Vec<f64>) = pts.iter().map(|[a, b]| (*a, *b)).unzip();
                    if wl.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(D::Error::custom(format!(
                            "qe.{name}: wavelengths not strictly increasing"
                        )));
                    }
                    let values = grid.wavelengths().map(|nm| interpolate_samples(&wl, &v, nm)).collect();
                    SpectralDistribution::new(grid, values, SpectralUnit::QuantumEfficiency)
                        .map_err(|e| D::Error::custom(format!("qe.{name}: {e}")))
                };
                Ok(QeCurves([curve("r", &r)?, curve("g", &g)?, curve("b", &b)?]))
            }
        }
    }
}

/// Electrical and geometric sensor parameters, named after the datasheet
/// rows with the unit in the suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub width: usize,
    pub height: usize,
    pub pixel_size_um: [f64; 2],
    pub fill_factor_percent: f64,
    pub well_capacity_e: f64,
    pub voltage_swing_v: f64,
    pub conversion_gain_v_per_e: f64,
    pub analog_gain: f64,
    pub analog_offset_mv: f64,
    pub bits: u32,
    pub dsnu_mv: f64,
    pub prnu_percent: f64,
    pub dark_voltage_mv_per_s: f64,
    pub read_noise_mv: f64,
    pub qe: QeCurves,
    pub cfa_pattern: CfaPattern,
    pub exposure_time_s: f64,
    /// Draw photon counts from a Poisson law; when false `n = n̄`.
    pub photon_noise: bool,
    pub pattern_seed: u64,
    pub noise_seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            width: 128,
            height: 96,
            pixel_size_um: [1.4, 1.4],
            fill_factor_percent: 100.0,
            well_capacity_e: 6000.0,
            voltage_swing_v: 0.4591,
            conversion_gain_v_per_e: 7.65e-5,
            analog_gain: 1.0,
            analog_offset_mv: 0.0,
            bits: 12,
            dsnu_mv: 0.64,
            prnu_percent: 0.7,
            dark_voltage_mv_per_s: 0.0,
            read_noise_mv: 5.0,
            qe: QeCurves::transformed(),
            cfa_pattern: CfaPattern::Rggb,
            exposure_time_s: 0.01,
            photon_noise: true,
            pattern_seed: 1,
            noise_seed: 2,
        }
    }
}

impl SensorConfig {
    /// Relative gap `(well·cg − swing)/swing`.
    pub fn electrical_mismatch(&self) -> f64 {
        (self.well_capacity_e * self.conversion_gain_v_per_e - self.voltage_swing_v) / self.voltage_swing_v
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.width == 0 || self.height == 0 {
            return bad("sensor width and height must be ≥ 1".into());
        }
        if self.pixel_size_um.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return bad("pixel size must be > 0".into());
        }
        if !(self.fill_factor_percent > 0.0 && self.fill_factor_percent <= 100.0) {
            return bad(format!("fill factor {}% outside (0, 100]", self.fill_factor_percent));
        }
        for (name, v) in [
            ("well_capacity_e", self.well_capacity_e),
            ("voltage_swing_v", self.voltage_swing_v),
            ("conversion_gain_v_per_e", self.conversion_gain_v_per_e),
            ("analog_gain", self.analog_gain),
            ("exposure_time_s", self.exposure_time_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be > 0"));
            }
        }
        for (name, v) in [
            ("analog_offset_mv", self.analog_offset_mv),
            ("dsnu_mv", self.dsnu_mv),
            ("prnu_percent", self.prnu_percent),
            ("dark_voltage_mv_per_s", self.dark_voltage_mv_per_s),
            ("read_noise_mv", self.read_noise_mv),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be ≥ 0"));
            }
        }
        if !(8..=16).contains(&self.bits) {
            return bad(format!("bits = {} outside [8, 16]", self.bits));
        }
        if self.electrical_mismatch() > 1e-3 {
            return bad(format!(
                "well capacity × conversion gain = {:.5} V exceeds the {:.4} V swing",
                self.well_capacity_e * self.conversion_gain_v_per_e,
                self.voltage_swing_v
            ));
        }
        for c in &self.qe.0 {
            expect_unit(c.unit(), SpectralUnit::QuantumEfficiency)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SensorConfig =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sensor config serializes")
    }

    pub fn max_dn(&self) -> f64 {
        ((1u32 << self.bits) - 1) as f64
    }

    /// Volts at the sense node → DN, including analog gain.
    pub fn dn_per_volt(&self) -> f64 {
        self.analog_gain * self.max_dn() / self.voltage_swing_v
    }

    /// Overall gain `K` in DN per electron.
    pub fn dn_per_electron(&self) -> f64 {
        self.conversion_gain_v_per_e * self.dn_per_volt()
    }

    pub fn read_noise_dn(&self) -> f64 {
        self.read_noise_mv * 1e-3 * self.dn_per_volt()
    }

    pub fn dsnu_dn(&self) -> f64 {
        self.dsnu_mv * 1e-3 * self.dn_per_volt()
    }

    pub fn pixel_area_m2(&self) -> f64 {
        self.pixel_size_um[0] * self.pixel_size_um[1] * 1e-12
    }

    /// Per-band `A·ff·t·QE(λ)·λ/(h·c)·Δλ` for one channel on `grid`, so that
    /// `n̄ = Σ E(λ)·w(λ)`.
    pub fn electron_weights(&self, channel: usize, grid: &WavelengthGrid) -> Vec<f64> {
        let qe = self.qe.0[channel].resample(grid);
        let k = self.pixel_area_m2() * self.fill_factor_percent / 100.0 * self.exposure_time_s * grid.step_nm();
        grid.wavelengths()
            .zip(qe.values())
            .map(|(nm, q)| k * q / photon_energy(nm))
            .collect()
    }
}

/// Expected photo-electrons collected by one pixel.
pub fn mean_electrons(
    irradiance: &SpectralDistribution,
    qe: &SpectralDistribution,
    config: &SensorConfig,
) -> Result<f64> {
    expect_unit(irradiance.unit(), SpectralUnit::Irradiance)?;
    expect_unit(qe.unit(), SpectralUnit::QuantumEfficiency)?;
    if irradiance.grid() != qe.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = irradiance.grid();
    let k = config.pixel_area_m2() * config.fill_factor_percent / 100.0 * config.exposure_time_s * grid.step_nm();
    Ok(grid
        .wavelengths()
        .zip(irradiance.values().iter().zip(qe.values()))
        .map(|(nm, (e, q))| e * q / photon_energy(nm))
        .sum::<f64>()
        * k)
}

/// Raw mosaicked digital values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalImage {
    pub width: usize,
    pub height: usize,
    pub bits: u32,
    pub cfa: CfaPattern,
    pub values: Vec<u16>,
}

impl DigitalImage {
    pub fn new(width: usize, height: usize, bits: u32, cfa: CfaPattern, values: Vec<u16>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {width}×{height} image",
                values.len()
            )));
        }
        if !(1..=16).contains(&bits) {
            return Err(Error::Format(format!("bit depth {bits} outside [1, 16]")));
        }
        let max = ((1u32 << bits) - 1) as u16;
        if let Some(v) = values.iter().find(|v| **v > max) {
            return Err(Error::Format(format!("DN {v} exceeds {max}")));
        }
        Ok(Self {
            width,
            height,
            bits,
            cfa,
            values,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    pub fn max_value(&self) -> u16 {
        ((1u32 << self.bits) - 1) as u16
    }

    /// 16-bit big-endian binary PGM with a `# cfa=… bits=…` comment.
    pub fn write_pgm(&self, mut w: impl Write) -> Result<()> {
        write!(
            w,
            "P5\n# cfa={} bits={}\n{} {}\n{}\n",
            self.cfa,
            self.bits,
            self.width,
            self.height,
            self.max_value()
        )?;
        let mut buf = Vec::with_capacity(self.values.len() * 2);
        for v in &self.values {
            buf.extend_from_slice(&v.to_be_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_pgm(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_pgm(r: impl Read) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut tokens: Vec<String> = Vec::new();
        let mut cfa = None;
        let mut bits = None;
        let mut line = String::new();
        while tokens.len() < 4 {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Format("truncated PGM header".into()));
            }
            let (content, comment) = match line.find('#') {
                Some(i) => (&line[..i], Some(&line[i + 1..])),
                None => (line.as_str(), None),
            };
            if let Some(c) = comment {
                for kv in c.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("cfa", v)) => cfa = Some(v.parse::<CfaPattern>()?),
                        Some(("bits", v)) => {
                            bits = Some(v.parse::<u32>().map_err(|_| Error::Format(format!("bad bits `{v}`")))?)
                        }
                        _ => {}
                    }
                }
            }
            tokens.extend(content.split_whitespace().map(String::from));
        }
        if tokens[0] != "P5" {
            return Err(Error::Format(format!("expected P5 magic, found `{}`", tokens[0])));
        }
        let num = |i: usize| -> Result<usize> {
            tokens[i]
                .parse()
                .map_err(|_| Error::Format(format!("bad PGM header field `{}`", tokens[i])))
        };
        let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
        if maxval < 256 {
            return Err(Error::Format("only 16-bit PGM files are supported".into()));
        }
        let bits = bits.unwrap_or_else(|| usize::BITS - maxval.leading_zeros());
        let mut raw = vec![0u8; width * height * 2];
        r.read_exact(&mut raw)
            .map_err(|_| Error::Format("truncated PGM payload".into()))?;
        let values = raw.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        DigitalImage::new(width, height, bits, cfa.unwrap_or_default(), values)
    }
}

/// Per-pixel dark offset (mV) and photo-response gain.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPatternMaps {
    pub width: usize,
    pub height: usize,
    pub offset_mv: Vec<f64>,
    pub gain: Vec<f64>,
}

impl FixedPatternMaps {
    /// Offset 0 and gain 1 everywhere.
    pub fn flat(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            offset_mv: vec![0.0; width * height],
            gain: vec![1.0; width * height],
        }
    }
}

const OFFSET_STREAM: u64 = 0xD5_00;
const GAIN_STREAM: u64 = 0x9A_00;

pub fn make_fixed_patterns(config: &SensorConfig) -> FixedPatternMaps {
    let (w, h) = (config.width, config.height);
    let mut maps = FixedPatternMaps::flat(w, h);
    let prnu = config.prnu_percent / 100.0;
    maps.offset_mv
        .par_chunks_mut(w)
        .zip(maps.gain.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (off, gain))| {
            let mut ro = StreamRng::from_words(&[config.pattern_seed, OFFSET_STREAM, y as u64]);
            let mut rg = StreamRng::from_words(&[config.pattern_seed, GAIN_STREAM, y as u64]);
            for x in 0..w {
                if config.dsnu_mv > 0.0 {
                    off[x] = config.dsnu_mv * ro.normal();
                }
                if prnu > 0.0 {
                    gain[x] = 1.0 + prnu * rg.normal();
                }
            }
        });
    maps
}

/// Single exposure (frame 0).
pub fn expose(cube: &IrradianceCube, config: &SensorConfig, patterns: &FixedPatternMaps) -> Result<DigitalImage> {
    expose_frame(cube, config, patterns, 0)
}

/// Exposure whose temporal noise is drawn from the streams of `frame`.
pub fn expose_frame(
    cube: &IrradianceCube,
    config: &SensorConfig,
    patterns: &FixedPatternMaps,
    frame: u64,
) -> Result<DigitalImage> {
    config.validate()?;
    expect_unit(cube.unit(), SpectralUnit::Irradiance)?;
    let (w, h) = (config.width, config.height);
    if cube.width() != w || cube.height() != h {
        return Err(Error::DimensionMismatch(format!(
            "irradiance is {}×{}, sensor is {w}×{h}",
            cube.width(),
            cube.height()
        )));
    }
    if patterns.width != w || patterns.height != h {
        return Err(Error::DimensionMismatch(format!(
            "fixed-pattern maps are {}×{}, sensor is {w}×{h}",
            patterns.width, patterns.height
        )));
    }
    let grid = *cube.grid();
    let weights: [Vec<f64>; 3] = std::array::from_fn(|c| config.electron_weights(c, &grid));
    let bands = grid.count();
    let cg = config.conversion_gain_v_per_e;
    let read_v = config.read_noise_mv * 1e-3;
    let dark_v = config.dark_voltage_mv_per_s * 1e-3 * config.exposure_time_s;
    let offset_v = config.analog_offset_mv * 1e-3;
    let swing = config.voltage_swing_v;
    let max_dn = config.max_dn();
    let plane = w * h;
    let data = cube.data();

    let mut values = vec![0u16; plane];
    values.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let p = y * w + x;
            let wc = &weights[config.cfa_pattern.channel(x, y)];
            let mut mean = 0.0;
            for b in 0..bands {
                mean += data[b * plane + p] * wc[b];
            }
            let mut rng = StreamRng::from_words(&[config.noise_seed, frame, x as u64, y as u64]);
            let n = if config.photon_noise { rng.poisson(mean) } else { mean };
            let n = n.min(config.well_capacity_e);
            let mut v = n * cg * patterns.gain[p] + dark_v + patterns.offset_mv[p] * 1e-3;
            if read_v > 0.0 {
                v += read_v * rng.normal();
            }
            let v = (v * config.analog_gain + offset_v).clamp(0.0, swing);
            *out = (v / swing * max_dn).round() as u16;
        }
    });
    DigitalImage::new(w, h, config.bits, config.cfa_pattern, values)
}

/// `count` exposures sharing fixed patterns, with independent temporal noise.
pub fn expose_stack(
    cube: &IrradianceCube,
    config: &SensorConfig,
    patterns: &FixedPatternMaps,
    count: usize,
) -> Result<Vec<DigitalImage>> {
    if count == 0 {
        return Err(Error::Config("stack count must be ≥ 1".into()));
    }
    (0..count as u64)
        .map(|f| expose_frame(cube, config, patterns, f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless() -> SensorConfig {
        SensorConfig {
            dsnu_mv: 0.0,
            prnu_percent: 0.0,
            read_noise_mv: 0.0,
            photon_noise: false,
            width: 8,
            height: 6,
            ..SensorConfig::default()
        }
    }

    fn uniform_irradiance(cfg: &SensorConfig, level: f64) -> IrradianceCube {
        let s = SpectralDistribution::constant(WavelengthGrid::visible(), level, SpectralUnit::Irradiance).unwrap();
        IrradianceCube::uniform(cfg.width, cfg.height, &s, cfg.pixel_size_um[0])
    }

    #[test]
    fn defaults_are_electrically_consistent() {
        let c = SensorConfig::default();
        c.validate().unwrap();
        assert!(c.electrical_mismatch().abs() < 1e-3);
        let k = c.dn_per_electron();
        assert!((k - 7.65e-5 * 4095.0 / 0.4591).abs() < 1e-12);
        let mut bad = c.clone();
        bad.well_capacity_e = 7000.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn mean_electrons_single_band() {
        let g = WavelengthGrid::visible();
        let mut v = vec![0.0; 31];
        v[g.index_of(550.0).unwrap()] = 1.0;
        let e = SpectralDistribution::new(g, v, SpectralUnit::Irradiance).unwrap();
        let qe = SpectralDistribution::constant(g, 1.0, SpectralUnit::QuantumEfficiency).unwrap();
        let cfg = SensorConfig::default();
        let n = mean_electrons(&e, &qe, &cfg).unwrap();
        // 1 W/m²/nm · 10 nm · (1.4 µm)² · 10 ms / (hc/550 nm)
        let expected = 10.0 * 1.96e-12 * 0.01 * 550e-9 / (6.626_070_15e-34 * 299_792_458.0);
        assert!((n - expected).abs() < 1e-9 * expected);
        assert!((n - 5.42678e5).abs() < 1.0, "{n}");
        let mut c2 = cfg.clone();
        c2.exposure_time_s *= 2.0;
        assert!((mean_electrons(&e, &qe, &c2).unwrap() - 2.0 * n).abs() < 1e-9 * n);
        let zero = SpectralDistribution::zeros(g, SpectralUnit::Irradiance);
        assert_eq!(mean_electrons(&zero, &qe, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn zero_light_no_noise_is_zero_dn() {
        let cfg = noiseless();
        let img = expose(&uniform_irradiance(&cfg, 0.0), &cfg, &make_fixed_patterns(&cfg)).unwrap();
        assert!(img.values.iter().all(|v| *v == 0));
    }

    #[test]
    fn saturation_reaches_full_scale() {
        let cfg = noiseless();
        let img = expose(&uniform_irradiance(&cfg, 10.0), &cfg, &make_fixed_patterns(&cfg)).unwrap();
        // 6000 e⁻ · 76.5 µV = 0.459 V, one DN short of the 0.4591 V swing.
        assert!(img.values.iter().all(|v| *v >= 4094), "{:?}", &img.values[..4]);
        let mut hot = cfg.clone();
        hot.analog_gain = 1.01;
        let img = expose(&uniform_irradiance(&hot, 10.0), &hot, &make_fixed_patterns(&hot)).unwrap();
        assert!(img.values.iter().all(|v| *v == 4095));
    }

    #[test]
    fn fixed_patterns_statistics_and_determinism() {
        let cfg = SensorConfig {
            width: 1000,
            height: 1000,
            ..SensorConfig::default()
        };
        let a = make_fixed_patterns(&cfg);
        let b = make_fixed_patterns(&cfg);
        assert_eq!(a, b);
        let n = a.offset_mv.len() as f64;
        let m = a.offset_mv.iter().sum::<f64>() / n;
        let sd = (a.offset_mv.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd / 0.64 - 1.0).abs() < 0.01, "{sd}");
        let gm = a.gain.iter().sum::<f64>() / n;
        let gs = (a.gain.iter().map(|v| (v - gm).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((gs / 0.007 - 1.0).abs() < 0.01, "{gs}");
        let off = make_fixed_patterns(&noiseless());
        assert!(off.offset_mv.iter().all(|v| *v == 0.0) && off.gain.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn pgm_round_trip() {
        let img = DigitalImage::new(3, 2, 12, CfaPattern::Grbg, vec![0, 1, 4095, 300, 7, 2048]).unwrap();
        let bytes = img.to_pgm_bytes();
        assert!(bytes.starts_with(b"P5\n# cfa=GRBG bits=12\n3 2\n4095\n"));
        assert_eq!(DigitalImage::read_pgm(&bytes[..]).unwrap(), img);
        assert!(DigitalImage::new(1, 1, 12, CfaPattern::Rggb, vec![4096]).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = SensorConfig::default();
        let back = SensorConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back.bits, 12);
        for (a, b) in back.qe.0.iter().zip(&c.qe.0) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        let named = SensorConfig::from_json(r#"{"qe": "published", "cfa_pattern": "bggr"}"#).unwrap();
        assert_eq!(named.cfa_pattern, CfaPattern::Bggr);
        let e = SensorConfig::from_json(r#"{"bits": 20}"#).unwrap_err().to_string();
        assert!(e.contains("bits"), "{e}");
        let e = SensorConfig::from_json(r#"{"gain": 2}"#).unwrap_err().to_string();
        assert!(e.contains("gain"), "{e}");
    }

    #[test]
    fn cfa_layouts() {
        assert_eq!(
            [0, 1, 2, 3].map(|i| CfaPattern::Rggb.channel(i % 2, i / 2)),
            [0, 1, 1, 2]
        );
        assert_eq!(CfaPattern::Gbrg.channel(1, 0), 2);
        assert!("XYZW".parse::<CfaPattern>().is_err());
    }

    #[test]
    fn stack_shares_patterns_but_not_noise() {
        let cfg = SensorConfig {
            width: 16,
            height: 16,
            analog_offset_mv: 50.0,
            ..SensorConfig::default()
        };
        let cube = uniform_irradiance(&cfg, 0.0);
        let p = make_fixed_patterns(&cfg);
        let stack = expose_stack(&cube, &cfg, &p, 2).unwrap();
        assert_eq!(stack[0], expose(&cube, &cfg, &p).unwrap());
        assert_ne!(stack[0], stack[1]);
        assert!(expose_stack(&cube, &cfg, &p, 0).is_err());
    }
}
