//! Spectral Monte Carlo path tracer for matte scenes.
//!
//! Paths start at the pinhole, gather direct light at every vertex by
//! sampling one area light (chosen in proportion to its area), then continue
//! along a cosine-weighted bounce. Emission is only counted when the camera
//! ray itself lands on a light; every later light contribution comes from
//! next-event estimation, so nothing is counted twice.
//!
//! Each `(pixel, sample)` pair owns its own random stream, so the output is
//! identical for any thread count.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::RadianceCube;
use crate::error::{Error, Result};
use crate::geometry::{Ray, Vec3};
use crate::radiometry::{LuminanceWeights, SpectralDistribution, SpectralUnit};
use crate::rng::StreamRng;
use crate::scene::{ExpandedLight, ExpandedScene, PinholeCamera, SceneGraph, Shading, Surface};

const RAY_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub samples_per_pixel: u32,
    /// Path vertices at which direct light is gathered (1 = direct only).
    pub max_depth: u32,
    pub russian_roulette_start_depth: u32,
    pub seed: u64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            samples_per_pixel: 256,
            max_depth: 10,
            russian_roulette_start_depth: 5,
            seed: 0,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_pixel == 0 {
            return Err(Error::Config("samples_per_pixel must be ≥ 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// How next-event estimation picks among several lights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightSelection {
    Area,
    Uniform,
}

struct Hit<'a> {
    point: Vec3,
    surface: &'a Surface,
    s: f64,
    u: f64,
}

/// Scene prepared for tracing: flattened surfaces plus a light CDF.
pub struct Integrator<'a> {
    scene: &'a ExpandedScene,
    config: RenderConfig,
    light_cdf: Vec<f64>,
}

impl<'a> Integrator<'a> {
    pub fn new(scene: &'a ExpandedScene, config: RenderConfig) -> Self {
        Self::with_selection(scene, config, LightSelection::Area)
    }

    pub fn with_selection(scene: &'a ExpandedScene, config: RenderConfig, selection: LightSelection) -> Self {
        let mut acc = 0.0;
        let mut light_cdf: Vec<f64> = scene
            .lights
            .iter()
            .map(|l| {
                acc += match selection {
                    LightSelection::Area => l.quad.area(),
                    LightSelection::Uniform => 1.0,
                };
                acc
            })
            .collect();
        for c in &mut light_cdf {
            *c /= acc;
        }
        Self {
            scene,
            config,
            light_cdf,
        }
    }

    fn bands(&self) -> usize {
        self.scene.grid.count()
    }

    fn nearest(&self, ray: &Ray, t_max: f64) -> Option<Hit<'a>> {
        let mut best: Option<Hit<'a>> = None;
        let mut t_best = t_max;
        for s in &self.scene.surfaces {
            if let Some(h) = s.quad.intersect(ray, RAY_EPS, t_best) {
                t_best = h.t;
                best = Some(Hit {
                    point: ray.at(h.t),
                    surface: s,
                    s: h.s,
                    u: h.u,
                });
            }
        }
        best
    }

    fn occluded(&self, ray: &Ray, t_max: f64) -> bool {
        self.scene
            .surfaces
            .iter()
            .any(|s| s.quad.intersect(ray, RAY_EPS, t_max).is_some())
    }

    fn reflectance(&self, surface: &Surface, s: f64, u: f64) -> &'a [f64] {
        let idx = match surface.shading {
            Shading::Uniform(i) => i,
            Shading::Split { dark, light, angle_rad } => {
                let x = (s - 0.5) * surface.quad.edge_u.length();
                let y = (u - 0.5) * surface.quad.edge_v.length();
                if x * angle_rad.cos() - y * angle_rad.sin() > 0.0 {
                    light
                } else {
                    dark
                }
            }
        };
        &self.scene.reflectances[idx]
    }

    fn pick_light(&self, xi: f64) -> (usize, f64) {
        let i = self
            .light_cdf
            .partition_point(|&c| c <= xi)
            .min(self.light_cdf.len() - 1);
        let lo = if i == 0 { 0.0 } else { self.light_cdf[i - 1] };
        (i, self.light_cdf[i] - lo)
    }

    /// One-sample estimate of reflected direct light at a surface point,
    /// without the reflectance factor: `L_e·cosθ_s·cosθ_l·A / (π·d²)` per
    /// band, accumulated into `out` scaled by `weight[b]·ρ[b]`.
    fn add_direct(&self, point: Vec3, normal: Vec3, rho: &[f64], weight: &[f64], rng: &mut StreamRng, out: &mut [f64]) {
        if self.scene.lights.is_empty() {
            return;
        }
        let (li, p_pick) = self.pick_light(rng.uniform());
        let light = &self.scene.lights[li];
        let (su, sv) = (rng.uniform(), rng.uniform());
        if let Some(g) = geometry_term(light, point, normal, su, sv) {
            let to = light.quad.point(su, sv) - point;
            let dist = to.length();
            if self.occluded(&Ray::new(point, to / dist), dist * (1.0 - 1e-7)) {
                return;
            }
            let f = g / (PI * p_pick);
            for b in 0..out.len() {
                out[b] += weight[b] * rho[b] * light.radiance[b] * f;
            }
        }
    }

    /// Radiance arriving along `ray`, added into `out`. `throughput` is a
    /// reusable scratch buffer.
    pub fn trace(&self, ray: Ray, rng: &mut StreamRng, out: &mut [f64], throughput: &mut Vec<f64>) {
        let n = self.bands();
        throughput.clear();
        throughput.resize(n, 1.0);
        let Some(hit) = self.nearest(&ray, f64::INFINITY) else {
            return;
        };
        if let Some(li) = hit.surface.light {
            let light = &self.scene.lights[li];
            let cos = -ray.dir.dot(light.quad.normal());
            if cos > 0.0 || light.two_sided {
                for b in 0..n {
                    out[b] += light.radiance[b];
                }
            }
        }
        let normal = facing(hit.surface.quad.normal(), ray.dir);
        self.continue_path(hit.point, normal, hit.surface, hit.s, hit.u, rng, out, throughput);
    }

    /// Reflected radiance leaving a surface point (excluding its own
    /// emission), starting with the throughput already in `throughput`.
    #[allow(clippy::too_many_arguments)]
    fn continue_path(
        &self,
        mut point: Vec3,
        mut normal: Vec3,
        mut surface: &'a Surface,
        mut s: f64,
        mut u: f64,
        rng: &mut StreamRng,
        out: &mut [f64],
        throughput: &mut [f64],
    ) {
        let cfg = &self.config;
        for depth in 0..cfg.max_depth {
            let rho = self.reflectance(surface, s, u);
            self.add_direct(point, normal, rho, throughput, rng, out);
            if depth + 1 == cfg.max_depth {
                break;
            }
            for (t, r) in throughput.iter_mut().zip(rho) {
                *t *= r;
            }
            if depth + 1 >= cfg.russian_roulette_start_depth {
                let q = throughput.iter().cloned().fold(0.0, f64::max).clamp(0.05, 0.95);
                if rng.uniform() >= q {
                    break;
                }
                throughput.iter_mut().for_each(|t| *t /= q);
            }
            if throughput.iter().all(|t| *t == 0.0) {
                break;
            }
            let dir = cosine_direction(normal, rng.uniform(), rng.uniform());
            let ray = Ray::new(point, dir);
            let Some(hit) = self.nearest(&ray, f64::INFINITY) else {
                break;
            };
            point = hit.point;
            normal = facing(hit.surface.quad.normal(), dir);
            surface = hit.surface;
            s = hit.s;
            u = hit.u;
        }
    }

    /// Monte Carlo estimate of the radiance leaving a surface point toward
    /// the side its normal faces (Lambertian, so direction-independent).
    pub fn surface_radiance(&self, surface: usize, s: f64, u: f64, samples: u32, seed: u64) -> Vec<f64> {
        let n = self.bands();
        let surf = &self.scene.surfaces[surface];
        let point = surf.quad.point(s, u) + surf.quad.normal() * 1e-6;
        let mut acc = vec![0.0; n];
        let mut tp = vec![1.0; n];
        for k in 0..samples {
            let mut rng = StreamRng::from_words(&[seed, 0x5u64, surface as u64, k as u64]);
            tp.iter_mut().for_each(|t| *t = 1.0);
            self.continue_path(point, surf.quad.normal(), surf, s, u, &mut rng, &mut acc, &mut tp);
        }
        acc.iter_mut().for_each(|v| *v /= samples as f64);
        acc
    }
}

/// `cosθ_s·cosθ_l·A / d²` for a point on the light at `(su, sv)`, or `None`
/// when either cosine is non-positive.
fn geometry_term(light: &ExpandedLight, point: Vec3, normal: Vec3, su: f64, sv: f64) -> Option<f64> {
    let to = light.quad.point(su, sv) - point;
    let d2 = to.dot(to);
    if d2 <= 0.0 {
        return None;
    }
    let dir = to / d2.sqrt();
    let cos_s = normal.dot(dir);
    let mut cos_l = -light.quad.normal().dot(dir);
    if light.two_sided {
        cos_l = cos_l.abs();
    }
    if cos_s <= 0.0 || cos_l <= 0.0 {
        return None;
    }
    Some(cos_s * cos_l * light.quad.area() / d2)
}

#[inline]
fn facing(n: Vec3, incoming: Vec3) -> Vec3 {
    if n.dot(incoming) > 0.0 {
        -n
    } else {
        n
    }
}

/// Cosine-weighted direction about unit normal `n`.
fn cosine_direction(n: Vec3, u1: f64, u2: f64) -> Vec3 {
    let r = u1.sqrt();
    let phi = 2.0 * PI * u2;
    let (t, b) = n.frame();
    (t * (r * phi.cos()) + b * (r * phi.sin()) + n * (1.0 - u1).max(0.0).sqrt()).normalized()
}

/// Single-sample next-event estimate of the light reflected by a matte
/// point: `L_e·(ρ/π)·cosθ_s·cosθ_l·A/d²`, or zero when occluded.
///
/// `occluders` are tested along the segment to the sampled light point.
pub fn direct_light_estimate(
    point: Vec3,
    normal: Vec3,
    reflectance: &SpectralDistribution,
    light: &ExpandedLight,
    occluders: &[Surface],
    rng: &mut StreamRng,
) -> SpectralDistribution {
    let grid = *reflectance.grid();
    let (su, sv) = (rng.uniform(), rng.uniform());
    let zero = SpectralDistribution::zeros(grid, SpectralUnit::Radiance);
    let Some(g) = geometry_term(light, point, normal, su, sv) else {
        return zero;
    };
    let to = light.quad.point(su, sv) - point;
    let dist = to.length();
    let ray = Ray::new(point, to / dist);
    if occluders
        .iter()
        .any(|s| s.quad.intersect(&ray, RAY_EPS, dist * (1.0 - 1e-7)).is_some())
    {
        return zero;
    }
    let values = reflectance
        .values()
        .iter()
        .zip(&light.radiance)
        .map(|(r, l)| l * r / PI * g)
        .collect();
    SpectralDistribution::new(grid, values, SpectralUnit::Radiance).expect("non-negative by construction")
}

/// Render the camera view of `scene`.
pub fn render(scene: &SceneGraph, config: &RenderConfig) -> Result<RadianceCube> {
    config.validate()?;
    let expanded = scene.expand()?;
    render_expanded(&expanded, &scene.camera, config)
}

/// Render with every pixel split into `factor × factor` samples; the result
/// has `factor`× the camera resolution and `1/factor` its pitch.
pub fn render_supersampled(scene: &SceneGraph, config: &RenderConfig, factor: usize) -> Result<RadianceCube> {
    if factor == 0 {
        return Err(Error::Config("supersampling factor must be ≥ 1".into()));
    }
    let mut cam = scene.camera.clone();
    cam.resolution = [cam.resolution[0] * factor, cam.resolution[1] * factor];
    config.validate()?;
    let expanded = scene.expand()?;
    render_expanded(&expanded, &cam, config)
}

pub fn render_expanded(scene: &ExpandedScene, camera: &PinholeCamera, config: &RenderConfig) -> Result<RadianceCube> {
    config.validate()?;
    camera.validate()?;
    let [w, h] = camera.resolution;
    let n = scene.grid.count();
    let integrator = Integrator::new(scene, config.clone());
    let spp = config.samples_per_pixel;
    let inv = 1.0 / spp as f64;

    // Pixel-major rows, one rayon task per row.
    let mut rows = vec![0.0f64; w * h * n];
    rows.par_chunks_mut(w * n).enumerate().for_each_init(
        || (vec![0.0; n], Vec::with_capacity(n)),
        |(acc, tp), (y, row)| {
            for x in 0..w {
                acc.iter_mut().for_each(|v| *v = 0.0);
                for k in 0..spp {
                    let mut rng = StreamRng::from_words(&[config.seed, x as u64, y as u64, k as u64]);
                    let ray = camera.ray(x as f64 + rng.uniform(), y as f64 + rng.uniform());
                    integrator.trace(ray, &mut rng, acc, tp);
                }
                for (o, a) in row[x * n..(x + 1) * n].iter_mut().zip(acc.iter()) {
                    *o = a * inv;
                }
            }
        },
    );
    let mut data = vec![0.0; w * h * n];
    for (p, px) in rows.chunks_exact(n).enumerate() {
        for (b, v) in px.iter().enumerate() {
            data[b * w * h + p] = *v;
        }
    }
    RadianceCube::from_planes(w, h, scene.grid, SpectralUnit::Radiance, camera.pitch_um(), data)
}

/// Mean photometric luminance (cd/m²) over all pixels.
pub fn mean_luminance(cube: &RadianceCube) -> Result<f64> {
    crate::radiometry::expect_unit(cube.unit(), SpectralUnit::Radiance)?;
    let weights = LuminanceWeights::new(cube.grid());
    let (w, h) = (cube.width(), cube.height());
    let mut px = vec![0.0; cube.bands()];
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            for (b, v) in px.iter_mut().enumerate() {
                *v = cube.get(x, y, b);
            }
            total += weights.apply(&px);
        }
    }
    Ok(total / (w * h) as f64)
}

/// Scale a cube uniformly so its mean luminance equals `target` cd/m².
pub fn scale_to_luminance(cube: &RadianceCube, target: f64) -> Result<RadianceCube> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::Config(format!("target luminance {target} must be ≥ 0")));
    }
    let current = mean_luminance(cube)?;
    let mut out = cube.clone();
    if target == 0.0 {
        out.scale(0.0);
        return Ok(out);
    }
    if !(current > 0.0) {
        return Err(Error::Degenerate("cube has zero mean luminance".into()));
    }
    if current != target {
        out.scale(target / current);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Quad;
    use crate::radiometry::WavelengthGrid;

    fn flat(v: f64) -> Vec<f64> {
        vec![v; 31]
    }

    fn one_light_scene(light_height: f64, side: f64) -> ExpandedScene {
        let grid = WavelengthGrid::visible();
        let q = Quad::new(
            Vec3::new(-side / 2.0, light_height, side / 2.0),
            Vec3::new(0.0, 0.0, -side),
            Vec3::new(side, 0.0, 0.0),
        );
        assert!(q.normal().y < 0.0);
        ExpandedScene {
            grid,
            reflectances: vec![flat(0.0)],
            surfaces: vec![Surface {
                name: "light".into(),
                quad: q,
                shading: Shading::Uniform(0),
                light: Some(0),
            }],
            lights: vec![ExpandedLight {
                quad: q,
                radiance: flat(2.0),
                two_sided: false,
            }],
        }
    }

    #[test]
    fn direct_estimate_small_light_overhead() {
        let ex = one_light_scene(2.0, 1e-3);
        let refl = SpectralDistribution::constant(ex.grid, 0.6, SpectralUnit::Reflectance).unwrap();
        let mut rng = StreamRng::new(1);
        let est = direct_light_estimate(
            Vec3::ZERO,
            Vec3::new(0.0, 1.0, 0.0),
            &refl,
            &ex.lights[0],
            &[],
            &mut rng,
        );
        let expected = 0.6 / PI * 2.0 * 1e-6 / 4.0;
        for v in est.values() {
            assert!((v - expected).abs() < 1e-6 * expected, "{v} vs {expected}");
        }
        // Linear in the emitted radiance.
        let mut brighter = ex.lights[0].clone();
        brighter.radiance = flat(6.0);
        let mut rng = StreamRng::new(1);
        let est3 = direct_light_estimate(Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0), &refl, &brighter, &[], &mut rng);
        assert!((est3.values()[0] - 3.0 * est.values()[0]).abs() < 1e-18);
    }

    #[test]
    fn direct_estimate_occluded_is_zero() {
        let ex = one_light_scene(2.0, 0.1);
        let blocker = Surface {
            name: "b".into(),
            quad: Quad::new(
                Vec3::new(-1.0, 1.0, -1.0),
                Vec3::new(2.0, 0.0, 0.0),
                Vec3::new(0.0, 0.0, 2.0),
            ),
            shading: Shading::Uniform(0),
            light: None,
        };
        let refl = SpectralDistribution::constant(ex.grid, 0.6, SpectralUnit::Reflectance).unwrap();
        let mut rng = StreamRng::new(9);
        let est = direct_light_estimate(
            Vec3::ZERO,
            Vec3::new(0.0, 1.0, 0.0),
            &refl,
            &ex.lights[0],
            &[blocker],
            &mut rng,
        );
        assert!(est.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn luminance_scaling() {
        let g = WavelengthGrid::visible();
        let s = SpectralDistribution::constant(g, 0.01, SpectralUnit::Radiance).unwrap();
        let cube = RadianceCube::uniform(4, 3, &s, 1.0);
        let scaled = scale_to_luminance(&cube, 21.5).unwrap();
        assert!((mean_luminance(&scaled).unwrap() - 21.5).abs() < 1e-9);
        let again = scale_to_luminance(&scaled, 21.5).unwrap();
        assert!((mean_luminance(&again).unwrap() - 21.5).abs() < 1e-9);
        let zero = scale_to_luminance(&cube, 0.0).unwrap();
        assert!(zero.data().iter().all(|v| *v == 0.0));
        let dark = RadianceCube::zeros(2, 2, g, SpectralUnit::Radiance, 1.0);
        assert!(scale_to_luminance(&dark, 21.5).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RenderConfig::default();
        assert_eq!(
            (c.samples_per_pixel, c.max_depth, c.russian_roulette_start_depth),
            (256, 10, 5)
        );
        c.samples_per_pixel = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn cosine_directions_are_in_hemisphere() {
        let n = Vec3::new(0.3, -0.5, 0.8).normalized();
        let mut rng = StreamRng::new(5);
        let mut mean_cos = 0.0;
        let k = 20_000;
        for _ in 0..k {
            let d = cosine_direction(n, rng.uniform(), rng.uniform());
            assert!(d.dot(n) >= 0.0);
            mean_cos += d.dot(n);
        }
        // E[cosθ] under a cosine lobe is 2/3.
        assert!((mean_cos / k as f64 - 2.0 / 3.0).abs() < 0.01);
    }
}
