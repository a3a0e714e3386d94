//! Cornell-box scene description.
//!
//! A [`SceneGraph`] holds named matte materials, emissive quads, opaque
//! primitives (quads and rotated boxes), one pinhole camera and any number
//! of flat test targets (ColorChecker, slanted edge). Coordinates are metres
//! with +y up; the box interior spans `x ∈ [-s/2, s/2]`, `y ∈ [0, s]`,
//! `z ∈ [-s, 0]` and its open side faces +z where the camera sits.

mod format;

use std::collections::BTreeMap;

use crate::data::MCC_NAMES;
use crate::error::{Error, Result};
use crate::geometry::{Quad, Ray, Vec3};
use crate::radiometry::{expect_unit, SpectralDistribution, SpectralUnit, WavelengthGrid};
use crate::spectra;

pub use format::{parse_scene, parse_scene_with_base, serialize_scene};

#[derive(Debug, Clone, PartialEq)]
pub struct MatteMaterial {
    pub reflectance: SpectralDistribution,
}

impl MatteMaterial {
    pub fn new(reflectance: SpectralDistribution) -> Result<Self> {
        expect_unit(reflectance.unit(), SpectralUnit::Reflectance)?;
        Ok(Self { reflectance })
    }
}

/// Emissive parallelogram. `spd` is the emitted radiance, uniform over the
/// quad and over directions in the emitting hemisphere(s).
#[derive(Debug, Clone, PartialEq)]
pub struct AreaLight {
    pub name: String,
    pub quad: Quad,
    pub spd: SpectralDistribution,
    pub two_sided: bool,
    /// Optional reflectance of the emitting surface; black when absent.
    pub material: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Quad(Quad),
    /// Axis-aligned box of `size = [w, h, d]` about `center`, rotated about
    /// the vertical axis through its centre.
    Box {
        center: Vec3,
        size: [f64; 3],
        rotation_y_deg: f64,
    },
}

impl Shape {
    /// Outward-facing quads making up the shape.
    pub fn quads(&self) -> Vec<Quad> {
        match self {
            Shape::Quad(q) => vec![*q],
            Shape::Box {
                center,
                size,
                rotation_y_deg,
            } => box_faces(*center, *size, *rotation_y_deg).to_vec(),
        }
    }
}

/// Box faces in the order `-x, +x, -y, +y, -z, +z`.
pub fn box_faces(center: Vec3, size: [f64; 3], rotation_y_deg: f64) -> [Quad; 6] {
    let [w, h, d] = size;
    let ex = Vec3::new(w, 0.0, 0.0).rotate_y(rotation_y_deg);
    let ey = Vec3::new(0.0, h, 0.0);
    let ez = Vec3::new(0.0, 0.0, d).rotate_y(rotation_y_deg);
    let lo = center - (ex + ey + ez) * 0.5;
    let hi = lo + ex + ey + ez;
    [
        Quad::new(lo, ez, ey),   // -x
        Quad::new(hi, -ey, -ez), // +x
        Quad::new(lo, ex, ez),   // -y
        Quad::new(hi, -ez, -ex), // +y
        Quad::new(lo, ey, ex),   // -z
        Quad::new(hi, -ex, -ey), // +z
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub name: String,
    pub shape: Shape,
    pub material: String,
}

/// Ideal pinhole camera with a rectangular film of square pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct PinholeCamera {
    pub position: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
    pub focal_length_mm: f64,
    pub sensor_width_mm: f64,
    pub sensor_height_mm: f64,
    /// `[width, height]` in pixels.
    pub resolution: [usize; 2],
}

impl PinholeCamera {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::Geometry {
            primitive: "camera".into(),
            reason,
        };
        let view = self.look_at - self.position;
        if !(view.length() > 0.0) {
            return Err(bad("look_at equals position".into()));
        }
        if !(self.up.length() > 0.0) || view.normalized().cross(self.up.normalized()).length() < 1e-9 {
            return Err(bad("up vector is parallel to the view direction".into()));
        }
        for (name, v) in [
            ("focal_length_mm", self.focal_length_mm),
            ("sensor_width_mm", self.sensor_width_mm),
            ("sensor_height_mm", self.sensor_height_mm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("{name} must be > 0")));
            }
        }
        let [w, h] = self.resolution;
        if w == 0 || h == 0 {
            return Err(bad("resolution must be at least 1×1".into()));
        }
        let px = self.sensor_width_mm / w as f64;
        let py = self.sensor_height_mm / h as f64;
        if ((px - py) / px).abs() > 1e-6 {
            return Err(bad(format!("non-square pixels ({px} × {py} mm)")));
        }
        Ok(())
    }

    /// Sample pitch at the film in micrometres.
    pub fn pitch_um(&self) -> f64 {
        self.sensor_width_mm * 1000.0 / self.resolution[0] as f64
    }

    pub fn basis(&self) -> (Vec3, Vec3, Vec3) {
        let forward = (self.look_at - self.position).normalized();
        let right = forward.cross(self.up).normalized();
        let up = right.cross(forward);
        (forward, right, up)
    }

    /// Ray through film position `(fx, fy)` in pixel units, measured from
    /// the top-left corner of the film.
    pub fn ray(&self, fx: f64, fy: f64) -> Ray {
        let (forward, right, up) = self.basis();
        let [w, h] = self.resolution;
        let pitch_mm = self.sensor_width_mm / w as f64;
        let x = (fx - 0.5 * w as f64) * pitch_mm;
        let y = (0.5 * h as f64 - fy) * pitch_mm;
        let dir = forward * self.focal_length_mm + right * x + up * y;
        Ray::new(self.position, dir.normalized())
    }

    /// Film coordinates (pixel units) where a world point projects, if it is
    /// in front of the camera.
    pub fn project(&self, p: Vec3) -> Option<(f64, f64)> {
        let (forward, right, up) = self.basis();
        let d = p - self.position;
        let z = d.dot(forward);
        if z <= 0.0 {
            return None;
        }
        let [w, h] = self.resolution;
        let pitch_mm = self.sensor_width_mm / w as f64;
        let x = d.dot(right) / z * self.focal_length_mm / pitch_mm;
        let y = d.dot(up) / z * self.focal_length_mm / pitch_mm;
        Some((x + 0.5 * w as f64, 0.5 * h as f64 - y))
    }
}

impl Default for PinholeCamera {
    fn default() -> Self {
        // 45° horizontal field of view from 0.8 m in front of the opening.
        let f = 4.38;
        let half = (22.5f64).to_radians().tan() * f;
        Self {
            position: Vec3::new(0.0, 0.275, 0.8),
            look_at: Vec3::new(0.0, 0.275, 0.0),
            up: Vec3::new(0.0, 1.0, 0.0),
            focal_length_mm: f,
            sensor_width_mm: 2.0 * half,
            sensor_height_mm: 2.0 * half * 0.75,
            resolution: [128, 96],
        }
    }
}

/// Flat calibration targets that expand into textured quads.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// 4 × 6 ColorChecker; patches on a backing of `margin_reflectance`.
    Mcc {
        center: Vec3,
        size: f64,
        normal: Vec3,
        up: Vec3,
        margin_reflectance: f64,
    },
    /// Square target split by a straight edge through its centre, tilted
    /// `angle_deg` from the target's up axis; dark on the left.
    SlantedEdge {
        center: Vec3,
        size: f64,
        angle_deg: f64,
        normal: Vec3,
        up: Vec3,
        dark_reflectance: f64,
        light_reflectance: f64,
    },
}

impl Target {
    fn frame(center: Vec3, normal: Vec3, up: Vec3) -> Result<(Vec3, Vec3, Vec3)> {
        let n = normal.normalized();
        let r = up.cross(n);
        if !(r.length() > 1e-9) || !n.is_finite() {
            return Err(Error::Geometry {
                primitive: "target".into(),
                reason: "normal and up must be non-zero and not parallel".into(),
            });
        }
        let r = r.normalized();
        let u = n.cross(r);
        let _ = center;
        Ok((n, r, u))
    }

    pub fn corners(&self) -> Result<[Vec3; 4]> {
        let (center, w, h, normal, up) = match self {
            Target::Mcc {
                center,
                size,
                normal,
                up,
                ..
            } => (*center, *size, *size * 4.0 / 6.0, *normal, *up),
            Target::SlantedEdge {
                center,
                size,
                normal,
                up,
                ..
            } => (*center, *size, *size, *normal, *up),
        };
        let (_, r, u) = Target::frame(center, normal, up)?;
        let o = center - r * (0.5 * w) - u * (0.5 * h);
        Ok(Quad::new(o, r * w, u * h).corners())
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::Geometry {
            primitive: "target".into(),
            reason,
        };
        match self {
            Target::Mcc {
                size,
                margin_reflectance,
                ..
            } => {
                if !(size.is_finite() && *size > 0.0) {
                    return Err(bad(format!("chart size {size} m must be > 0")));
                }
                if !(0.0..=1.0).contains(margin_reflectance) {
                    return Err(bad("reflectance out of range".into()));
                }
            }
            Target::SlantedEdge {
                size,
                angle_deg,
                dark_reflectance,
                light_reflectance,
                ..
            } => {
                if !(size.is_finite() && *size > 0.0) {
                    return Err(bad(format!("target size {size} m must be > 0")));
                }
                if !(*angle_deg > 0.0 && *angle_deg < 45.0) {
                    return Err(bad(format!("edge angle {angle_deg}° outside (0°, 45°)")));
                }
                if !(0.0..=1.0).contains(dark_reflectance) || !(0.0..=1.0).contains(light_reflectance) {
                    return Err(bad("reflectance out of range".into()));
                }
            }
        }
        self.corners().map(|_| ())
    }
}

/// Reflectance of a renderable surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shading {
    /// Index into [`ExpandedScene::reflectances`].
    Uniform(usize),
    /// Two reflectances separated by a line through the quad centre at
    /// `angle_rad` from the quad's `edge_v` axis.
    Split { dark: usize, light: usize, angle_rad: f64 },
}

#[derive(Debug, Clone)]
pub struct Surface {
    pub name: String,
    pub quad: Quad,
    pub shading: Shading,
    /// Index into [`ExpandedScene::lights`] for emissive surfaces.
    pub light: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ExpandedLight {
    pub quad: Quad,
    pub radiance: Vec<f64>,
    pub two_sided: bool,
}

/// Flattened, render-ready view of a scene.
#[derive(Debug, Clone)]
pub struct ExpandedScene {
    pub grid: WavelengthGrid,
    pub reflectances: Vec<Vec<f64>>,
    pub surfaces: Vec<Surface>,
    pub lights: Vec<ExpandedLight>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub grid: WavelengthGrid,
    pub materials: BTreeMap<String, MatteMaterial>,
    pub lights: Vec<AreaLight>,
    pub primitives: Vec<Primitive>,
    pub camera: PinholeCamera,
    pub targets: Vec<Target>,
}

/// Axis-aligned bounds of a set of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    fn of(points: impl IntoIterator<Item = Vec3>) -> Option<Bounds> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds { min: first, max: first };
        for p in it {
            b.min = Vec3::new(b.min.x.min(p.x), b.min.y.min(p.y), b.min.z.min(p.z));
            b.max = Vec3::new(b.max.x.max(p.x), b.max.y.max(p.y), b.max.z.max(p.z));
        }
        Some(b)
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
            && p.z >= self.min.z - tol
            && p.z <= self.max.z + tol
    }
}

impl SceneGraph {
    /// Check the structural invariants: a valid camera, at least one light,
    /// resolvable material references, non-degenerate geometry and a shared
    /// wavelength grid.
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        if self.lights.is_empty() {
            return Err(Error::Geometry {
                primitive: "lights".into(),
                reason: "at least one light is required".into(),
            });
        }
        for (name, m) in &self.materials {
            if m.reflectance.grid() != &self.grid {
                return Err(Error::Geometry {
                    primitive: format!("material {name}"),
                    reason: "reflectance is not on the scene grid".into(),
                });
            }
        }
        for l in &self.lights {
            if !(l.quad.area() > 0.0) {
                return Err(Error::Geometry {
                    primitive: l.name.clone(),
                    reason: "light has zero area".into(),
                });
            }
            expect_unit(l.spd.unit(), SpectralUnit::Radiance)?;
            if l.spd.grid() != &self.grid {
                return Err(Error::Geometry {
                    primitive: l.name.clone(),
                    reason: "light spectrum is not on the scene grid".into(),
                });
            }
            if let Some(m) = &l.material {
                if !self.materials.contains_key(m) {
                    return Err(Error::Geometry {
                        primitive: l.name.clone(),
                        reason: format!("unknown material `{m}`"),
                    });
                }
            }
        }
        for p in &self.primitives {
            if !self.materials.contains_key(&p.material) {
                return Err(Error::Geometry {
                    primitive: p.name.clone(),
                    reason: format!("unknown material `{}`", p.material),
                });
            }
            for q in p.shape.quads() {
                if !(q.area() > 0.0) {
                    return Err(Error::Geometry {
                        primitive: p.name.clone(),
                        reason: "degenerate face".into(),
                    });
                }
            }
        }
        for t in &self.targets {
            t.validate()?;
        }
        Ok(())
    }

    /// Bounds of every primitive and light; the enclosure targets must fit in.
    pub fn bounds(&self) -> Option<Bounds> {
        Bounds::of(
            self.primitives
                .iter()
                .flat_map(|p| p.shape.quads())
                .chain(self.lights.iter().map(|l| l.quad))
                .flat_map(|q| q.corners()),
        )
    }

    pub fn primitive(&self, name: &str) -> Option<&Primitive> {
        self.primitives.iter().find(|p| p.name == name)
    }

    fn check_target_fits(&self, target: &Target) -> Result<()> {
        target.validate()?;
        let bounds = self.bounds().ok_or_else(|| Error::Geometry {
            primitive: "target".into(),
            reason: "scene has no enclosure".into(),
        })?;
        for c in target.corners()? {
            if !bounds.contains(c, 1e-9) {
                return Err(Error::Geometry {
                    primitive: "target".into(),
                    reason: format!("corner ({:.3}, {:.3}, {:.3}) lies outside the box", c.x, c.y, c.z),
                });
            }
        }
        Ok(())
    }

    /// Flatten materials, primitives, lights and targets into render-ready
    /// surfaces.
    pub fn expand(&self) -> Result<ExpandedScene> {
        self.validate()?;
        let mut reflectances: Vec<Vec<f64>> = Vec::new();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (name, m) in &self.materials {
            index.insert(name.as_str(), reflectances.len());
            reflectances.push(m.reflectance.values().to_vec());
        }
        let black = reflectances.len();
        reflectances.push(vec![0.0; self.grid.count()]);
        let push_reflectance = |v: Vec<f64>, reflectances: &mut Vec<Vec<f64>>| {
            reflectances.push(v);
            reflectances.len() - 1
        };

        let mut surfaces = Vec::new();
        let mut lights = Vec::new();
        for (i, l) in self.lights.iter().enumerate() {
            lights.push(ExpandedLight {
                quad: l.quad,
                radiance: l.spd.values().to_vec(),
                two_sided: l.two_sided,
            });
            let m = l.material.as_deref().map_or(black, |m| index[m]);
            surfaces.push(Surface {
                name: l.name.clone(),
                quad: l.quad,
                shading: Shading::Uniform(m),
                light: Some(i),
            });
        }
        for p in &self.primitives {
            let m = index[p.material.as_str()];
            for q in p.shape.quads() {
                surfaces.push(Surface {
                    name: p.name.clone(),
                    quad: q,
                    shading: Shading::Uniform(m),
                    light: None,
                });
            }
        }
        for (ti, t) in self.targets.iter().enumerate() {
            match t {
                Target::Mcc {
                    center,
                    size,
                    normal,
                    up,
                    margin_reflectance,
                } => {
                    let (n, r, u) = Target::frame(*center, *normal, *up)?;
                    let pitch = size / 6.0;
                    let (w, h) = (*size, 4.0 * pitch);
                    let base = *center + n * 0.001;
                    let margin = push_reflectance(vec![*margin_reflectance; self.grid.count()], &mut reflectances);
                    surfaces.push(Surface {
                        name: format!("mcc{ti}/backing"),
                        quad: Quad::new(base - r * (0.5 * w) - u * (0.5 * h), r * w, u * h),
                        shading: Shading::Uniform(margin),
                        light: None,
                    });
                    let side = 0.85 * pitch;
                    for row in 0..4 {
                        for col in 0..6 {
                            let k = row * 6 + col;
                            let refl = spectra::mcc_patch(&self.grid, k).into_values();
                            let mi = push_reflectance(refl, &mut reflectances);
                            let c = base
                                + n * 0.0005
                                + r * ((col as f64 + 0.5) * pitch - 0.5 * w)
                                + u * (0.5 * h - (row as f64 + 0.5) * pitch);
                            surfaces.push(Surface {
                                name: format!("mcc{ti}/{}", MCC_NAMES[k]),
                                quad: Quad::new(c - r * (0.5 * side) - u * (0.5 * side), r * side, u * side),
                                shading: Shading::Uniform(mi),
                                light: None,
                            });
                        }
                    }
                }
                Target::SlantedEdge {
                    center,
                    size,
                    angle_deg,
                    normal,
                    up,
                    dark_reflectance,
                    light_reflectance,
                } => {
                    let (n, r, u) = Target::frame(*center, *normal, *up)?;
                    let dark = push_reflectance(vec![*dark_reflectance; self.grid.count()], &mut reflectances);
                    let light = push_reflectance(vec![*light_reflectance; self.grid.count()], &mut reflectances);
                    let base = *center + n * 0.0005;
                    surfaces.push(Surface {
                        name: format!("edge{ti}"),
                        quad: Quad::new(base - r * (0.5 * size) - u * (0.5 * size), r * *size, u * *size),
                        shading: Shading::Split {
                            dark,
                            light,
                            angle_rad: angle_deg.to_radians(),
                        },
                        light: None,
                    });
                }
            }
        }
        Ok(ExpandedScene {
            grid: self.grid,
            reflectances,
            surfaces,
            lights,
        })
    }
}

/// Rectangular hole in the ceiling, in plan view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleRect {
    pub center_x: f64,
    pub center_z: f64,
    pub width: f64,
    pub depth: f64,
}

/// Block resting on the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub name: String,
    pub center_x: f64,
    pub center_z: f64,
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub rotation_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallSpectra {
    pub left: SpectralDistribution,
    pub right: SpectralDistribution,
    pub white: SpectralDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornellBoxParams {
    pub box_size: f64,
    pub blocks: Vec<BlockSpec>,
    pub light_hole: HoleRect,
    pub walls: WallSpectra,
    pub light_spd: SpectralDistribution,
    pub camera: PinholeCamera,
}

impl Default for CornellBoxParams {
    fn default() -> Self {
        let grid = WavelengthGrid::visible();
        Self {
            box_size: 0.55,
            blocks: vec![
                BlockSpec {
                    name: "tall_block".into(),
                    center_x: -0.135,
                    center_z: -0.36,
                    width: 0.165,
                    depth: 0.165,
                    height: 0.33,
                    rotation_deg: 15.0,
                },
                BlockSpec {
                    name: "short_block".into(),
                    center_x: 0.14,
                    center_z: -0.2,
                    width: 0.165,
                    depth: 0.165,
                    height: 0.165,
                    rotation_deg: -18.0,
                },
            ],
            light_hole: HoleRect {
                center_x: 0.0,
                center_z: -0.275,
                width: 0.13,
                depth: 0.105,
            },
            walls: WallSpectra {
                left: spectra::red_paper(&grid),
                right: spectra::green_paper(&grid),
                white: spectra::white_paint(&grid),
            },
            light_spd: spectra::light_spd(&grid),
            camera: PinholeCamera::default(),
        }
    }
}

/// Quad with corners `o`, `o+a`, `o+a+b`, `o+b` whose normal points along
/// `facing`.
fn facing_quad(o: Vec3, a: Vec3, b: Vec3, facing: Vec3) -> Quad {
    let q = Quad::new(o, a, b);
    if q.normal().dot(facing) < 0.0 {
        q.flipped()
    } else {
        q
    }
}

/// Build the five-walled box (open toward +z), its blocks and the ceiling
/// light covering the hole.
pub fn build_cornell_box(params: &CornellBoxParams) -> Result<SceneGraph> {
    let s = params.box_size;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Geometry {
            primitive: "box".into(),
            reason: format!("box size {s} m must be > 0"),
        });
    }
    let h = 0.5 * s;
    let hole = params.light_hole;
    if !(hole.width > 0.0 && hole.depth > 0.0) {
        return Err(Error::Geometry {
            primitive: "light".into(),
            reason: "light hole has zero area".into(),
        });
    }
    let (x0, x1) = (hole.center_x - 0.5 * hole.width, hole.center_x + 0.5 * hole.width);
    let (z0, z1) = (hole.center_z - 0.5 * hole.depth, hole.center_z + 0.5 * hole.depth);
    if x0 <= -h || x1 >= h || z0 <= -s || z1 >= 0.0 {
        return Err(Error::Geometry {
            primitive: "light".into(),
            reason: "light hole extends past the ceiling".into(),
        });
    }

    let grid = *params.walls.white.grid();
    let mut materials = BTreeMap::new();
    materials.insert("white".to_string(), MatteMaterial::new(params.walls.white.clone())?);
    materials.insert("left_wall".to_string(), MatteMaterial::new(params.walls.left.clone())?);
    materials.insert(
        "right_wall".to_string(),
        MatteMaterial::new(params.walls.right.clone())?,
    );

    let up = Vec3::new(0.0, 1.0, 0.0);
    let ex = Vec3::new(1.0, 0.0, 0.0);
    let ez = Vec3::new(0.0, 0.0, 1.0);
    let wall = |name: &str, q: Quad, m: &str| Primitive {
        name: name.into(),
        shape: Shape::Quad(q),
        material: m.into(),
    };
    let mut primitives = vec![
        wall(
            "floor",
            facing_quad(Vec3::new(-h, 0.0, -s), ex * s, ez * s, up),
            "white",
        ),
        wall(
            "back_wall",
            facing_quad(Vec3::new(-h, 0.0, -s), ex * s, up * s, ez),
            "white",
        ),
        wall(
            "left_wall",
            facing_quad(Vec3::new(-h, 0.0, -s), up * s, ez * s, ex),
            "left_wall",
        ),
        wall(
            "right_wall",
            facing_quad(Vec3::new(h, 0.0, -s), up * s, ez * s, -ex),
            "right_wall",
        ),
    ];
    // Ceiling as four panels framing the hole.
    let ceiling_panels = [
        ("ceiling_front", Vec3::new(-h, s, z1), s, -z1),
        ("ceiling_back", Vec3::new(-h, s, -s), s, z0 + s),
        ("ceiling_left", Vec3::new(-h, s, z0), x0 + h, z1 - z0),
        ("ceiling_right", Vec3::new(x1, s, z0), h - x1, z1 - z0),
    ];
    for (name, o, w, d) in ceiling_panels {
        if w > 1e-12 && d > 1e-12 {
            primitives.push(wall(name, facing_quad(o, ex * w, ez * d, -up), "white"));
        }
    }

    for b in &params.blocks {
        if !(b.width > 0.0 && b.depth > 0.0 && b.height > 0.0) {
            return Err(Error::Geometry {
                primitive: b.name.clone(),
                reason: "block dimensions must be > 0".into(),
            });
        }
        if b.height > s {
            return Err(Error::Geometry {
                primitive: b.name.clone(),
                reason: format!("block height {} m exceeds box height {s} m", b.height),
            });
        }
        let center = Vec3::new(b.center_x, 0.5 * b.height, b.center_z);
        let shape = Shape::Box {
            center,
            size: [b.width, b.height, b.depth],
            rotation_y_deg: b.rotation_deg,
        };
        for q in shape.quads() {
            for c in q.corners() {
                if c.x < -h - 1e-12 || c.x > h + 1e-12 || c.z < -s - 1e-12 || c.z > 1e-12 {
                    return Err(Error::Geometry {
                        primitive: b.name.clone(),
                        reason: "block footprint extends outside the box".into(),
                    });
                }
            }
        }
        primitives.push(Primitive {
            name: b.name.clone(),
            shape,
            material: "white".into(),
        });
    }

    let light = AreaLight {
        name: "ceiling_light".into(),
        quad: facing_quad(Vec3::new(x0, s, z0), ex * hole.width, ez * hole.depth, -up),
        spd: params.light_spd.resample(&grid),
        two_sided: false,
        material: None,
    };
    let scene = SceneGraph {
        grid,
        materials,
        lights: vec![light],
        primitives,
        camera: params.camera.clone(),
        targets: Vec::new(),
    };
    scene.validate()?;
    Ok(scene)
}

/// Named ColorChecker positions against the back wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MccPosition {
    Left,
    Center,
    Right,
}

impl MccPosition {
    /// Chart centre for a box of side `box_size`, a chart of `size` metres.
    pub fn center(self, box_size: f64, size: f64) -> Vec3 {
        let inset = 0.5 * box_size - 0.5 * size - 0.015;
        let x = match self {
            MccPosition::Left => -inset,
            MccPosition::Center => 0.0,
            MccPosition::Right => inset,
        };
        Vec3::new(x, 0.78 * box_size, -box_size)
    }
}

/// Default chart width (m).
pub const MCC_DEFAULT_SIZE: f64 = 0.25;

/// Add a ColorChecker facing +z with black (reflectance 0) margins.
pub fn place_mcc(scene: &SceneGraph, center: Vec3, size: f64) -> Result<SceneGraph> {
    place_mcc_with_margin(scene, center, size, 0.0)
}

pub fn place_mcc_with_margin(
    scene: &SceneGraph,
    center: Vec3,
    size: f64,
    margin_reflectance: f64,
) -> Result<SceneGraph> {
    let target = Target::Mcc {
        center,
        size,
        normal: Vec3::new(0.0, 0.0, 1.0),
        up: Vec3::new(0.0, 1.0, 0.0),
        margin_reflectance,
    };
    scene.check_target_fits(&target)?;
    let mut out = scene.clone();
    out.targets.push(target);
    Ok(out)
}

/// Add a slanted-edge target facing the camera.
pub fn place_slanted_edge(scene: &SceneGraph, center: Vec3, size: f64, angle_deg: f64) -> Result<SceneGraph> {
    let normal = (scene.camera.position - center).normalized();
    let target = Target::SlantedEdge {
        center,
        size,
        angle_deg,
        normal,
        up: scene.camera.up,
        dark_reflectance: 0.05,
        light_reflectance: 0.85,
    };
    scene.check_target_fits(&target)?;
    let mut out = scene.clone();
    out.targets.push(target);
    Ok(out)
}
