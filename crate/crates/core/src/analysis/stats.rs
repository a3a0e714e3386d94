use crate::error::{Error, Result};
use crate::sensor::DigitalImage;

use super::RgbImage;

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Roi {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    fn check(&self, w: usize, h: usize) -> Result<()> {
        if self.x + self.width > w || self.y + self.height > h {
            return Err(Error::OutOfBounds(format!(
                "roi {}×{}+{}+{} outside {w}×{h}",
                self.width, self.height, self.x, self.y
            )));
        }
        if self.width * self.height < 16 {
            return Err(Error::OutOfBounds(format!(
                "roi area {} is below 16 pixels",
                self.width * self.height
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for Roi {
    type Err = Error;

    /// `x,y,width,height`.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("roi `{s}` is not x,y,width,height")))?;
        match v.as_slice() {
            [x, y, w, h] => Ok(Roi::new(*x, *y, *w, *h)),
            _ => Err(Error::Config(format!("roi `{s}` is not x,y,width,height"))),
        }
    }
}

/// Per-channel sample mean and standard deviation (R, G, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStats {
    pub mean: [f64; 3],
    pub std: [f64; 3],
    pub count: [usize; 3],
}

impl RegionStats {
    pub fn csv_header() -> &'static str {
        "channel,mean,std,count"
    }

    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for (c, name) in ["r", "g", "b"].iter().enumerate() {
            s.push_str(&format!("{name},{},{},{}\n", self.mean[c], self.std[c], self.count[c]));
        }
        s
    }
}

#[derive(Default, Clone, Copy)]
struct Acc {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Acc {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

fn finish(acc: [Acc; 3]) -> RegionStats {
    RegionStats {
        mean: acc.map(|a| a.mean),
        std: acc.map(|a| a.std()),
        count: acc.map(|a| a.n),
    }
}

/// Statistics of each channel of a demosaicked image over `roi`.
pub fn region_stats(img: &RgbImage, roi: Roi) -> Result<RegionStats> {
    roi.check(img.width, img.height)?;
    let mut acc = [Acc::default(); 3];
    for y in roi.y..roi.y + roi.height {
        for x in roi.x..roi.x + roi.width {
            let p = img.get(x, y);
            for c in 0..3 {
                acc[c].push(p[c]);
            }
        }
    }
    Ok(finish(acc))
}

/// Statistics of the raw CFA sites of each colour inside `roi`.
pub fn raw_region_stats(img: &DigitalImage, roi: Roi) -> Result<RegionStats> {
    roi.check(img.width, img.height)?;
    let mut acc = [Acc::default(); 3];
    for y in roi.y..roi.y + roi.height {
        for x in roi.x..roi.x + roi.width {
            acc[img.cfa.channel(x, y)].push(img.get(x, y) as f64);
        }
    }
    Ok(finish(acc))
}

/// DN values along part of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    pub row: usize,
    pub columns: Vec<usize>,
    pub values: Vec<[f64; 3]>,
}

impl LineProfile {
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("column,r,g,b\n");
        for (c, v) in self.columns.iter().zip(&self.values) {
            s.push_str(&format!("{c},{},{},{}\n", v[0], v[1], v[2]));
        }
        s
    }
}

/// Profile of `row` over columns `[x0, x1)`.
pub fn line_profile(img: &RgbImage, row: usize, x0: usize, x1: usize) -> Result<LineProfile> {
    if row >= img.height || x1 > img.width || x0 >= x1 {
        return Err(Error::OutOfBounds(format!(
            "row {row}, columns {x0}..{x1} outside {}×{}",
            img.width, img.height
        )));
    }
    Ok(LineProfile {
        row,
        columns: (x0..x1).collect(),
        values: (x0..x1).map(|x| img.get(x, row)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Degenerate("need at least two (x, y) pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    fn constant_rgb(w: usize, h: usize, v: f64) -> RgbImage {
        RgbImage {
            width: w,
            height: h,
            data: vec![[v, v, v]; w * h],
        }
    }

    #[test]
    fn constant_region_has_zero_std() {
        let s = region_stats(&constant_rgb(10, 10, 7.0), Roi::new(2, 2, 5, 5)).unwrap();
        assert_eq!(s.mean, [7.0; 3]);
        assert_eq!(s.std, [0.0; 3]);
        assert_eq!(s.count, [25; 3]);
    }

    #[test]
    fn roi_validation() {
        let img = constant_rgb(10, 10, 1.0);
        assert!(region_stats(&img, Roi::new(8, 8, 4, 4)).is_err());
        assert!(region_stats(&img, Roi::new(0, 0, 3, 3)).is_err());
        assert_eq!("1,2,3,4".parse::<Roi>().unwrap(), Roi::new(1, 2, 3, 4));
        assert!("1,2,3".parse::<Roi>().is_err());
    }

    #[test]
    fn gaussian_region_moments() {
        let (w, h) = (100, 100);
        let mut rng = StreamRng::new(17);
        let data = (0..w * h)
            .map(|_| {
                let v = 100.0 + 2.0 * rng.normal();
                [v, v, v]
            })
            .collect();
        let img = RgbImage {
            width: w,
            height: h,
            data,
        };
        let s = region_stats(&img, Roi::new(0, 0, w, h)).unwrap();
        assert!((s.mean[0] - 100.0).abs() < 0.1);
        assert!((s.std[0] - 2.0).abs() < 0.05);
    }

    #[test]
    fn profile_shape() {
        let img = constant_rgb(10, 4, 3.0);
        let p = line_profile(&img, 2, 1, 8).unwrap();
        assert_eq!(p.columns.len(), 7);
        assert!(p.channel(1).iter().all(|v| *v == 3.0));
        assert!(p.to_csv().starts_with("column,r,g,b\n1,3,3,3\n"));
        assert!(line_profile(&img, 4, 0, 3).is_err());
    }

    #[test]
    fn line_fit_exact() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }
}
