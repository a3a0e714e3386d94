use crate::error::Result;
use crate::sensor::DigitalImage;

/// Three-channel floating-point raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f64; 3]>,
}

impl RgbImage {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|p| p[c]).collect()
    }

    /// 8-bit binary PPM preview, values scaled by `1/max_value` with a
    /// simple gamma of 1/2.2.
    pub fn to_ppm_preview(&self, max_value: f64) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for p in &self.data {
            for v in p {
                let t = (v / max_value).clamp(0.0, 1.0).powf(1.0 / 2.2);
                out.push((t * 255.0).round() as u8);
            }
        }
        out
    }
}

/// Bilinear demosaic: a missing channel is the mean of the same-channel
/// pixels in the 3×3 neighbourhood (two or four of them for a Bayer
/// layout; fewer at the border).
pub fn demosaic_bilinear(img: &DigitalImage) -> Result<RgbImage> {
    let (w, h) = (img.width, img.height);
    let cfa = img.cfa;
    let mut data = vec![[0.0; 3]; w * h];
    for y in 0..h {
        for x in 0..w {
            let own = cfa.channel(x, y);
            let mut sum = [0.0; 3];
            let mut n = [0u32; 3];
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    let c = cfa.channel(nx, ny);
                    if c != own {
                        sum[c] += img.get(nx, ny) as f64;
                        n[c] += 1;
                    }
                }
            }
            let px = &mut data[y * w + x];
            for c in 0..3 {
                px[c] = if c == own {
                    img.get(x, y) as f64
                } else if n[c] > 0 {
                    sum[c] / n[c] as f64
                } else {
                    0.0
                };
            }
        }
    }
    Ok(RgbImage {
        width: w,
        height: h,
        data,
    })
}
