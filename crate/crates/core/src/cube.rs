//! Spectral rasters (radiance at the scene side, irradiance at the sensor
//! plane) and the `SPECTRAL-RASTER v1` file format.
//!
//! File layout: ASCII header lines
//!
//! ```text
//! SPECTRAL-RASTER v1
//! width <w>
//! height <h>
//! grid <start_nm> <step_nm> <count>
//! unit <radiance|irradiance|...>
//! pitch_um <sample pitch at the image plane>
//! data
//! ```
//!
//! followed by `w·h·count` little-endian `f32` values in wavelength-major
//! planes (all pixels of band 0 row by row, then band 1, ...).

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::radiometry::{SpectralDistribution, SpectralUnit, WavelengthGrid};

pub const SPECTRAL_RASTER_MAGIC: &str = "SPECTRAL-RASTER v1";

/// `width × height × bands` raster of a spectral quantity, stored as
/// wavelength-major planes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    width: usize,
    height: usize,
    grid: WavelengthGrid,
    unit: SpectralUnit,
    pitch_um: f64,
    data: Vec<f64>,
}

/// Scene-side spectral radiance seen by the camera (W·sr⁻¹·m⁻²·nm⁻¹).
pub type RadianceCube = SpectralCube;
/// Sensor-plane spectral irradiance (W·m⁻²·nm⁻¹).
pub type IrradianceCube = SpectralCube;

impl SpectralCube {
    pub fn zeros(width: usize, height: usize, grid: WavelengthGrid, unit: SpectralUnit, pitch_um: f64) -> Self {
        Self {
            width,
            height,
            grid,
            unit,
            pitch_um,
            data: vec![0.0; width * height * grid.count()],
        }
    }

    pub fn from_planes(
        width: usize,
        height: usize,
        grid: WavelengthGrid,
        unit: SpectralUnit,
        pitch_um: f64,
        data: Vec<f64>,
    ) -> Result<Self> {
        if data.len() != width * height * grid.count() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {width}×{height}×{} cube",
                data.len(),
                grid.count()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSpectrum(format!("cube value {v} is negative")));
        }
        if !(pitch_um.is_finite() && pitch_um > 0.0) {
            return Err(Error::Config(format!("sample pitch {pitch_um} µm must be > 0")));
        }
        Ok(Self {
            width,
            height,
            grid,
            unit,
            pitch_um,
            data,
        })
    }

    /// A cube where every pixel carries the same spectrum.
    pub fn uniform(width: usize, height: usize, spectrum: &SpectralDistribution, pitch_um: f64) -> Self {
        let mut cube = Self::zeros(width, height, *spectrum.grid(), spectrum.unit(), pitch_um);
        for (b, &v) in spectrum.values().iter().enumerate() {
            cube.plane_mut(b).fill(v);
        }
        cube
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn unit(&self) -> SpectralUnit {
        self.unit
    }

    /// Distance between sample centres at the image plane.
    pub fn pitch_um(&self) -> f64 {
        self.pitch_um
    }

    pub fn bands(&self) -> usize {
        self.grid.count()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, band: usize) -> &[f64] {
        let n = self.plane_len();
        &self.data[band * n..(band + 1) * n]
    }

    pub fn plane_mut(&mut self, band: usize) -> &mut [f64] {
        let n = self.plane_len();
        &mut self.data[band * n..(band + 1) * n]
    }

    pub fn planes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.plane_len())
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, band: usize) -> f64 {
        self.data[band * self.plane_len() + y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, band: usize, v: f64) {
        let n = self.plane_len();
        self.data[band * n + y * self.width + x] = v;
    }

    /// Spectrum at one pixel.
    pub fn pixel(&self, x: usize, y: usize) -> Vec<f64> {
        (0..self.bands()).map(|b| self.get(x, y, b)).collect()
    }

    pub fn pixel_spectrum(&self, x: usize, y: usize) -> SpectralDistribution {
        SpectralDistribution::new(self.grid, self.pixel(x, y), self.unit)
            .expect("cube values are validated non-negative")
    }

    pub fn with_unit(mut self, unit: SpectralUnit) -> Self {
        self.unit = unit;
        self
    }

    pub fn with_pitch(mut self, pitch_um: f64) -> Self {
        self.pitch_um = pitch_um;
        self
    }

    /// Multiply every sample by `factor`.
    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// Crop a rectangular window.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<SpectralCube> {
        if x0 + w > self.width || y0 + h > self.height || w == 0 || h == 0 {
            return Err(Error::OutOfBounds(format!(
                "crop {w}×{h}+{x0}+{y0} outside {}×{}",
                self.width, self.height
            )));
        }
        let mut out = SpectralCube::zeros(w, h, self.grid, self.unit, self.pitch_um);
        for b in 0..self.bands() {
            for y in 0..h {
                for x in 0..w {
                    out.set(x, y, b, self.get(x0 + x, y0 + y, b));
                }
            }
        }
        Ok(out)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        write!(
            w,
            "{SPECTRAL_RASTER_MAGIC}\nwidth {}\nheight {}\ngrid {} {} {}\nunit {}\npitch_um {}\ndata\n",
            self.width,
            self.height,
            self.grid.start_nm(),
            self.grid.step_nm(),
            self.grid.count(),
            self.unit,
            self.pitch_um
        )?;
        let mut buf = Vec::with_capacity(self.data.len() * 4);
        for v in &self.data {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from(r: impl Read) -> Result<SpectralCube> {
        let mut r = BufReader::new(r);
        let mut line = String::new();
        let mut next_line = |r: &mut BufReader<_>| -> Result<String> {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Format("truncated SPECTRAL-RASTER header".into()));
            }
            Ok(line.trim_end().to_string())
        };
        if next_line(&mut r)? != SPECTRAL_RASTER_MAGIC {
            return Err(Error::Format("missing SPECTRAL-RASTER v1 magic".into()));
        }
        let mut width = None;
        let mut height = None;
        let mut grid = None;
        let mut unit = None;
        let mut pitch = None;
        loop {
            let l = next_line(&mut r)?;
            if l == "data" {
                break;
            }
            let mut parts = l.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let fields: Vec<&str> = parts.collect();
            let num = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Format(format!("bad header line `{l}`")))
            };
            match key {
                "width" => width = Some(num(0)? as usize),
                "height" => height = Some(num(0)? as usize),
                "grid" => grid = Some(WavelengthGrid::new(num(0)?, num(1)?, num(2)? as usize)?),
                "unit" => {
                    unit = Some(
                        fields
                            .first()
                            .ok_or_else(|| Error::Format("missing unit tag".into()))?
                            .parse::<SpectralUnit>()?,
                    )
                }
                "pitch_um" => pitch = Some(num(0)?),
                other => return Err(Error::Format(format!("unknown header key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::Format(format!("header missing `{k}`"));
        let width = width.ok_or_else(|| missing("width"))?;
        let height = height.ok_or_else(|| missing("height"))?;
        let grid = grid.ok_or_else(|| missing("grid"))?;
        let unit = unit.ok_or_else(|| missing("unit"))?;
        let pitch = pitch.unwrap_or(1.0);
        let n = width * height * grid.count();
        let mut raw = vec![0u8; n * 4];
        r.read_exact(&mut raw)
            .map_err(|_| Error::Format("truncated SPECTRAL-RASTER payload".into()))?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        SpectralCube::from_planes(width, height, grid, unit, pitch, data)
    }
}
