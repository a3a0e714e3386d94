use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};

use camsim_core::analysis::{
    demosaic_bilinear, line_profile, raw_region_stats, slanted_edge_mtf, solve_qe_transform, solve_qe_transform_sparse,
    QeTransform, RegionStats, Roi, DEFAULT_OVERSAMPLE,
};
use camsim_core::rng::StreamRng;
use camsim_core::sensor::DigitalImage;
use camsim_core::svg::{plot, PlotKind, Series};

use crate::Global;

const CHANNELS: [&str; 3] = ["r", "g", "b"];

#[derive(Subcommand, Debug)]
pub enum AnalyzeCommand {
    /// Slanted-edge MTF of a region of a raw image.
    Mtf(MtfArgs),
    /// Fit the 3×3 QE transform between predicted and measured channel means.
    QeFit(QeFitArgs),
    /// Per-channel values along one row of the demosaicked image.
    Profile(ProfileArgs),
    /// Mean/std comparison of matched regions in two raw images.
    Noise(NoiseArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChannelArg {
    /// Raw DN values, ignoring the mosaic.
    Raw,
    R,
    G,
    B,
}

#[derive(Args, Debug)]
pub struct MtfArgs {
    raw: PathBuf,
    /// Region x,y,width,height containing one slanted edge.
    #[arg(long)]
    roi: Roi,
    #[arg(long, value_enum, default_value = "g")]
    channel: ChannelArg,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    oversample: usize,
    /// Pixel pitch; adds a cycles/mm column.
    #[arg(long)]
    pitch_um: Option<f64>,
    #[arg(long, default_value = "mtf")]
    name: String,
}

#[derive(Args, Debug)]
pub struct QeFitArgs {
    /// CSV of predicted channel means (columns r,g,b).
    #[arg(long, required_unless_present = "synthetic")]
    predicted: Option<PathBuf>,
    /// CSV of measured channel means (columns r,g,b).
    #[arg(long, required_unless_present = "synthetic")]
    measured: Option<PathBuf>,
    /// Generate predicted rows and measured = predicted·M₀ (+ noise) with
    /// M₀ the reference transform.
    #[arg(long, conflicts_with_all = ["predicted", "measured"])]
    synthetic: bool,
    /// Rows to synthesize.
    #[arg(long, default_value_t = 72)]
    rows: usize,
    /// Relative Gaussian noise on synthesized measurements.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Zero entries below this magnitude and re-solve.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value = "qe_fit")]
    name: String,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    raw: PathBuf,
    #[arg(long)]
    row: usize,
    #[arg(long, default_value_t = 0)]
    x0: usize,
    /// End column (exclusive); defaults to the image width.
    #[arg(long)]
    x1: Option<usize>,
    /// Multiply values before export.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value = "profile")]
    name: String,
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    first: PathBuf,
    second: PathBuf,
    /// Number of regions; picked automatically unless `--roi` is given.
    #[arg(long, default_value_t = 3)]
    regions: usize,
    /// Explicit regions (repeatable).
    #[arg(long)]
    roi: Vec<Roi>,
    /// Side of the candidate tiles for automatic selection [default: 200,
    /// or the shorter image side if smaller]. At ~50 DN of noise a 2 DN
    /// std comparison needs on the order of 10⁴ pixels per channel.
    #[arg(long)]
    tile: Option<usize>,
    /// Largest per-channel mean difference for a matched region (DN).
    #[arg(long, default_value_t = 2.0)]
    mean_tolerance: f64,
    #[arg(long, default_value = "noise")]
    name: String,
}

pub fn run(g: &Global, cmd: &AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Mtf(a) => mtf(g, a),
        AnalyzeCommand::QeFit(a) => qe_fit(g, a),
        AnalyzeCommand::Profile(a) => profile(g, a),
        AnalyzeCommand::Noise(a) => noise(g, a),
    }
}

fn read_raw(path: &Path) -> Result<DigitalImage> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    DigitalImage::read_pgm(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn mtf(g: &Global, a: &MtfArgs) -> Result<()> {
    let raw = read_raw(&a.raw)?;
    let roi = a.roi;
    if roi.x + roi.width > raw.width || roi.y + roi.height > raw.height {
        bail!(
            "roi {}×{}+{}+{} is outside the {}×{} image",
            roi.width,
            roi.height,
            roi.x,
            roi.y,
            raw.width,
            raw.height
        );
    }
    let rgb = match a.channel {
        ChannelArg::Raw => None,
        _ => Some(demosaic_bilinear(&raw)?),
    };
    let value = |x: usize, y: usize| -> f64 {
        match (&rgb, a.channel) {
            (Some(img), ChannelArg::R) => img.get(x, y)[0],
            (Some(img), ChannelArg::G) => img.get(x, y)[1],
            (Some(img), ChannelArg::B) => img.get(x, y)[2],
            _ => raw.get(x, y) as f64,
        }
    };
    let mut region = Vec::with_capacity(roi.width * roi.height);
    for y in roi.y..roi.y + roi.height {
        for x in roi.x..roi.x + roi.width {
            region.push(value(x, y));
        }
    }
    let curve = slanted_edge_mtf(&region, roi.width, roi.height, a.oversample)?;
    let csv = match a.pitch_um {
        None => curve.to_csv(),
        Some(p) => {
            let mm = curve.cycles_per_mm(p);
            let mut s = String::from("frequency,modulation,cycles_per_mm\n");
            for ((f, m), c) in curve.frequencies.iter().zip(&curve.modulation).zip(mm) {
                s.push_str(&format!("{f},{m},{c}\n"));
            }
            s
        }
    };
    let csv_path = g.write(&format!("{}.csv", a.name), csv)?;
    let pts = curve
        .frequencies
        .iter()
        .copied()
        .zip(curve.modulation.iter().copied())
        .collect();
    let svg = plot(
        &format!("Slanted-edge MTF ({:.2}°)", curve.edge_angle_deg),
        "cycles/pixel",
        "modulation",
        PlotKind::Line,
        &[Series::new("estimate", pts)],
    );
    let svg_path = g.write(&format!("{}.svg", a.name), svg)?;
    println!(
        "edge angle {:.3}°, MTF at 0.25 cy/px {:.4}, at 0.5 cy/px {:.4}",
        curve.edge_angle_deg,
        curve.at(0.25),
        curve.at(0.5)
    );
    println!("{}\n{}", csv_path.display(), svg_path.display());
    Ok(())
}

fn read_rgb_csv(path: &Path) -> Result<Vec<[f64; 3]>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            bail!(
                "{}:{}: expected 3 columns, found {}",
                path.display(),
                i + 1,
                fields.len()
            );
        }
        match (
            fields[0].parse::<f64>(),
            fields[1].parse::<f64>(),
            fields[2].parse::<f64>(),
        ) {
            (Ok(r), Ok(g), Ok(b)) => rows.push([r, g, b]),
            // A header line.
            _ if rows.is_empty() && i == 0 => {}
            _ => bail!("{}:{}: non-numeric value", path.display(), i + 1),
        }
    }
    Ok(rows)
}

fn synthesize(rows: usize, noise: f64, seed: u64) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let m0 = QeTransform::reference();
    let mut rng = StreamRng::new(seed);
    let predicted: Vec<[f64; 3]> = (0..rows)
        .map(|_| std::array::from_fn(|_| 50.0 + 950.0 * rng.uniform()))
        .collect();
    let measured = m0
        .predict(&predicted)
        .into_iter()
        .map(|r| r.map(|v| v * (1.0 + noise * rng.normal())))
        .collect();
    (predicted, measured)
}

fn qe_fit(g: &Global, a: &QeFitArgs) -> Result<()> {
    let (predicted, measured) = if a.synthetic {
        if a.rows < 3 {
            bail!("need at least 3 rows");
        }
        synthesize(a.rows, a.noise, g.seed.unwrap_or(0))
    } else {
        let p = read_rgb_csv(a.predicted.as_deref().expect("clap enforces"))?;
        let m = read_rgb_csv(a.measured.as_deref().expect("clap enforces"))?;
        (p, m)
    };
    let fit = match a.threshold {
        Some(t) => solve_qe_transform_sparse(&predicted, &measured, t)?,
        None => solve_qe_transform(&predicted, &measured)?,
    };
    let m = fit.transform.m;
    let json = format!(
        "{{\"transform\": {}, \"residual_rms\": {}, \"rows\": {}}}\n",
        fit.transform.to_json(),
        fit.residual_rms,
        predicted.len()
    );
    let json_path = g.write(&format!("{}.json", a.name), json)?;
    let fitted = fit.transform.predict(&predicted);
    let mut csv = String::from("row,channel,fitted,measured\n");
    let mut series: Vec<Series> = CHANNELS.iter().map(|c| Series::new(*c, Vec::new())).collect();
    for (i, (f, y)) in fitted.iter().zip(&measured).enumerate() {
        for c in 0..3 {
            csv.push_str(&format!("{i},{},{},{}\n", CHANNELS[c], f[c], y[c]));
            series[c].points.push((f[c], y[c]));
        }
    }
    let csv_path = g.write(&format!("{}.csv", a.name), csv)?;
    let svg = plot("QE transform fit", "fitted", "measured", PlotKind::Scatter, &series);
    let svg_path = g.write(&format!("{}.svg", a.name), svg)?;
    for row in m {
        println!("{:>10.5} {:>10.5} {:>10.5}", row[0], row[1], row[2]);
    }
    println!("residual rms {:.6}", fit.residual_rms);
    println!(
        "{}\n{}\n{}",
        json_path.display(),
        csv_path.display(),
        svg_path.display()
    );
    Ok(())
}

fn profile(g: &Global, a: &ProfileArgs) -> Result<()> {
    let raw = read_raw(&a.raw)?;
    let rgb = demosaic_bilinear(&raw)?;
    let x1 = a.x1.unwrap_or(rgb.width);
    let mut p = line_profile(&rgb, a.row, a.x0, x1)?;
    for v in &mut p.values {
        v.iter_mut().for_each(|c| *c *= a.scale);
    }
    let csv_path = g.write(&format!("{}.csv", a.name), p.to_csv())?;
    let series: Vec<Series> = (0..3)
        .map(|c| {
            let pts = p.columns.iter().map(|&x| x as f64).zip(p.channel(c)).collect();
            Series::new(CHANNELS[c], pts)
        })
        .collect();
    let svg = plot(
        &format!("Row {}", a.row),
        "column",
        "digital value",
        PlotKind::Line,
        &series,
    );
    let svg_path = g.write(&format!("{}.svg", a.name), svg)?;
    let (sr, sg): (f64, f64) = p.values.iter().fold((0.0, 0.0), |(r, g), v| (r + v[0], g + v[1]));
    if sg > 0.0 {
        println!("mean R/G {:.4}", sr / sg);
    }
    println!("{}\n{}", csv_path.display(), svg_path.display());
    Ok(())
}

struct Matched {
    roi: Roi,
    a: RegionStats,
    b: RegionStats,
}

impl Matched {
    fn max_gap(&self) -> f64 {
        (0..3)
            .map(|c| (self.a.std[c] - self.b.std[c]).abs())
            .fold(0.0, f64::max)
    }
}

/// Overlapping tiles (stride `tile/5`) that are unclipped in both images
/// and whose per-channel means agree within `tol`, split into `n` buckets
/// by green mean; the tile with the lowest green std/mean wins each bucket.
fn pick_regions(a: &DigitalImage, b: &DigitalImage, n: usize, tile: usize, tol: f64) -> Result<Vec<Matched>> {
    if tile < 4 || tile > a.width.min(a.height) {
        bail!("tile must be between 4 and {} pixels", a.width.min(a.height));
    }
    let stride = (tile / 5).max(1);
    // Saturation can land a code below full scale.
    let near_full = ((1u32 << a.bits) - 2).min(u16::MAX as u32) as u16;
    let clipped = |img: &DigitalImage, r: Roi| {
        (r.y..r.y + r.height).any(|y| {
            img.values[y * img.width + r.x..y * img.width + r.x + r.width]
                .iter()
                .any(|&v| v == 0 || v >= near_full)
        })
    };
    let mut cands = Vec::new();
    for y in (0..=a.height - tile).step_by(stride) {
        for x in (0..=a.width - tile).step_by(stride) {
            let roi = Roi::new(x, y, tile, tile);
            if clipped(a, roi) || clipped(b, roi) {
                continue;
            }
            let sa = raw_region_stats(a, roi)?;
            let sb = raw_region_stats(b, roi)?;
            if (0..3).all(|c| (sa.mean[c] - sb.mean[c]).abs() <= tol) {
                cands.push(Matched { roi, a: sa, b: sb });
            }
        }
    }
    if cands.len() < n {
        bail!("only {} of the requested {n} regions have matched means", cands.len());
    }
    cands.sort_by(|x, y| x.a.mean[1].total_cmp(&y.a.mean[1]));
    let flatness = |m: &Matched| m.a.std[1] / m.a.mean[1].max(1.0);
    let mut out = Vec::with_capacity(n);
    let mut rest = cands;
    for k in 0..n {
        let take = rest.len() / (n - k);
        let bucket: Vec<Matched> = rest.drain(..take).collect();
        let flat = bucket
            .into_iter()
            .min_by(|x, y| flatness(x).total_cmp(&flatness(y)))
            .expect("bucket is non-empty");
        out.push(flat);
    }
    Ok(out)
}

fn noise(g: &Global, a: &NoiseArgs) -> Result<()> {
    let first = read_raw(&a.first)?;
    let second = read_raw(&a.second)?;
    if (first.width, first.height, first.cfa) != (second.width, second.height, second.cfa) {
        bail!("images differ in size or mosaic layout");
    }
    let regions = if a.roi.is_empty() {
        if a.regions == 0 {
            bail!("--regions must be ≥ 1");
        }
        let tile = a.tile.unwrap_or(200).min(first.width.min(first.height));
        pick_regions(&first, &second, a.regions, tile, a.mean_tolerance)?
    } else {
        a.roi
            .iter()
            .map(|&roi| {
                Ok(Matched {
                    roi,
                    a: raw_region_stats(&first, roi)?,
                    b: raw_region_stats(&second, roi)?,
                })
            })
            .collect::<Result<_>>()?
    };
    let mut csv = String::from("region,x,y,width,height,channel,mean_a,std_a,mean_b,std_b,std_gap\n");
    let mut series: Vec<Series> = CHANNELS.iter().map(|c| Series::new(*c, Vec::new())).collect();
    for (i, m) in regions.iter().enumerate() {
        let r = m.roi;
        for c in 0..3 {
            let gap = (m.a.std[c] - m.b.std[c]).abs();
            csv.push_str(&format!(
                "{i},{},{},{},{},{},{},{},{},{},{gap}\n",
                r.x, r.y, r.width, r.height, CHANNELS[c], m.a.mean[c], m.a.std[c], m.b.mean[c], m.b.std[c]
            ));
            series[c].points.push((m.a.mean[c], m.a.std[c]));
            series[c].points.push((m.b.mean[c], m.b.std[c]));
        }
    }
    let csv_path = g.write(&format!("{}.csv", a.name), csv)?;
    let svg = plot("Noise vs mean", "mean (DN)", "std (DN)", PlotKind::Scatter, &series);
    let svg_path = g.write(&format!("{}.svg", a.name), svg)?;
    let gap = regions.iter().map(Matched::max_gap).fold(0.0, f64::max);
    println!("regions {}, max std gap {gap:.3} DN", regions.len());
    println!("{}\n{}", csv_path.display(), svg_path.display());
    Ok(())
}
