//! JSON scene documents.
//!
//! ```json
//! {
//!   "camera": { "position": [0, 0.275, 0.8], "look_at": [0, 0.275, 0], "up": [0, 1, 0],
//!               "focal_length_mm": 4.38, "sensor_width_mm": 3.6, "sensor_height_mm": 2.7,
//!               "resolution": [128, 96] },
//!   "materials": { "white": [[400, 0.8], [700, 0.8]], "red": "red.csv" },
//!   "lights": [ { "name": "lamp", "corners": [[..], [..], [..], [..]],
//!                 "spd": [[400, 1.0], [700, 1.0]], "two_sided": false } ],
//!   "primitives": [ { "type": "quad", "name": "floor", "corners": [..], "material": "white" },
//!                   { "type": "box", "name": "block", "center": [..], "size": [w, h, d],
//!                     "rotation_y_deg": 15, "material": "white" } ],
//!   "targets": [ { "type": "mcc", "center": [..], "size": 0.25, "normal": [0, 0, 1],
//!                  "up": [0, 1, 0], "margin_reflectance": 0 } ]
//! }
//! ```
//!
//! Spectra are either inline `[wavelength_nm, value]` pairs or a path to a
//! `wavelength_nm,value` CSV (relative to the scene file). Every spectrum is
//! resampled onto the 400–700/10 nm grid. Lengths are metres, angles degrees;
//! unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AreaLight, MatteMaterial, PinholeCamera, Primitive, SceneGraph, Shape, Target};
use crate::error::{Error, Result};
use crate::geometry::{Quad, Vec3};
use crate::radiometry::{interpolate_samples, parse_spectrum_csv, SpectralDistribution, SpectralUnit, WavelengthGrid};

const TOP_LEVEL_KEYS: [&str; 5] = ["camera", "materials", "lights", "primitives", "targets"];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    camera: CameraDoc,
    materials: BTreeMap<String, SpectrumDoc>,
    lights: Vec<LightDoc>,
    #[serde(default)]
    primitives: Vec<PrimitiveDoc>,
    #[serde(default)]
    targets: Vec<TargetDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SpectrumDoc {
    Path(String),
    Samples(Vec<[f64; 2]>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraDoc {
    position: Vec3,
    look_at: Vec3,
    up: Vec3,
    focal_length_mm: f64,
    sensor_width_mm: f64,
    sensor_height_mm: f64,
    resolution: [usize; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LightDoc {
    name: String,
    corners: [Vec3; 4],
    spd: SpectrumDoc,
    #[serde(default)]
    two_sided: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    material: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum PrimitiveDoc {
    Quad {
        name: String,
        corners: [Vec3; 4],
        material: String,
    },
    Box {
        name: String,
        center: Vec3,
        size: [f64; 3],
        #[serde(default)]
        rotation_y_deg: f64,
        material: String,
    },
}

fn default_normal() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

fn default_up() -> Vec3 {
    Vec3::new(0.0, 1.0, 0.0)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum TargetDoc {
    Mcc {
        center: Vec3,
        size: f64,
        #[serde(default = "default_normal")]
        normal: Vec3,
        #[serde(default = "default_up")]
        up: Vec3,
        #[serde(default)]
        margin_reflectance: f64,
    },
    SlantedEdge {
        center: Vec3,
        size: f64,
        angle_deg: f64,
        #[serde(default = "default_normal")]
        normal: Vec3,
        #[serde(default = "default_up")]
        up: Vec3,
        dark_reflectance: f64,
        light_reflectance: f64,
    },
}

fn parse_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::SceneParse {
        path: path.into(),
        reason: reason.into(),
    }
}

struct Loader<'a> {
    grid: WavelengthGrid,
    base: Option<&'a Path>,
}

impl Loader<'_> {
    fn spectrum(&self, doc: &SpectrumDoc, unit: SpectralUnit, path: &str) -> Result<SpectralDistribution> {
        match doc {
            SpectrumDoc::Path(p) => {
                let full: PathBuf = match self.base {
                    Some(b) => b.join(p),
                    None => PathBuf::from(p),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| parse_err(path, format!("cannot read {}: {e}", full.display())))?;
                parse_spectrum_csv(&text, unit, &self.grid).map_err(|e| parse_err(path, e.to_string()))
            }
            SpectrumDoc::Samples(samples) => {
                if samples.is_empty() {
                    return Err(parse_err(path, "spectrum has no samples"));
                }
                let (wl, vals): (Vec<f64>, Vec<f64>) = samples.iter().map(|[w, v]| (*w, *v)).unzip();
                if wl.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(parse_err(path, "wavelengths not strictly increasing"));
                }
                for (i, v) in vals.iter().enumerate() {
                    if unit.is_fraction() && !(0.0..=1.0).contains(v) {
                        return Err(parse_err(format!("{path}[{i}]"), format!("{unit} out of range: {v}")));
                    }
                }
                let values = self
                    .grid
                    .wavelengths()
                    .map(|nm| interpolate_samples(&wl, &vals, nm))
                    .collect();
                SpectralDistribution::new(self.grid, values, unit).map_err(|e| parse_err(path, e.to_string()))
            }
        }
    }
}

fn corners_quad(c: &[Vec3; 4], path: &str) -> Result<Quad> {
    let q = Quad::from_corners(*c).ok_or_else(|| parse_err(path, "corners do not form a planar parallelogram"))?;
    if !(q.area() > 0.0) {
        return Err(parse_err(path, "quad has zero area"));
    }
    Ok(q)
}

/// Parse a scene document; CSV paths resolve against the working directory.
pub fn parse_scene(text: &str) -> Result<SceneGraph> {
    parse_scene_with_base(text, None)
}

/// Parse a scene document, resolving CSV paths relative to `base`.
pub fn parse_scene_with_base(text: &str, base: Option<&Path>) -> Result<SceneGraph> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err("$", "scene document must be a JSON object"))?;
    for key in obj.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            return Err(parse_err(key.as_str(), "unknown key"));
        }
    }
    if !obj.contains_key("camera") {
        return Err(parse_err("camera", "camera required"));
    }
    let doc: SceneDoc = serde_path_to_error::deserialize(&value).map_err(|e| {
        let path = e.path().to_string();
        parse_err(path, e.into_inner().to_string())
    })?;

    let loader = Loader {
        grid: WavelengthGrid::visible(),
        base,
    };
    let c = &doc.camera;
    let camera = PinholeCamera {
        position: c.position,
        look_at: c.look_at,
        up: c.up,
        focal_length_mm: c.focal_length_mm,
        sensor_width_mm: c.sensor_width_mm,
        sensor_height_mm: c.sensor_height_mm,
        resolution: c.resolution,
    };
    camera.validate().map_err(|e| parse_err("camera", e.to_string()))?;

    let mut materials = BTreeMap::new();
    for (name, spec) in &doc.materials {
        let path = format!("materials.{name}");
        let refl = loader.spectrum(spec, SpectralUnit::Reflectance, &path)?;
        materials.insert(name.clone(), MatteMaterial::new(refl)?);
    }

    let mut lights = Vec::new();
    for (i, l) in doc.lights.iter().enumerate() {
        let path = format!("lights[{i}]");
        lights.push(AreaLight {
            name: l.name.clone(),
            quad: corners_quad(&l.corners, &format!("{path}.corners"))?,
            spd: loader.spectrum(&l.spd, SpectralUnit::Radiance, &format!("{path}.spd"))?,
            two_sided: l.two_sided,
            material: l.material.clone(),
        });
    }

    let mut primitives = Vec::new();
    for (i, p) in doc.primitives.iter().enumerate() {
        let path = format!("primitives[{i}]");
        primitives.push(match p {
            PrimitiveDoc::Quad {
                name,
                corners,
                material,
            } => Primitive {
                name: name.clone(),
                shape: Shape::Quad(corners_quad(corners, &format!("{path}.corners"))?),
                material: material.clone(),
            },
            PrimitiveDoc::Box {
                name,
                center,
                size,
                rotation_y_deg,
                material,
            } => {
                if size.iter().any(|s| !(*s > 0.0)) {
                    return Err(parse_err(format!("{path}.size"), "box dimensions must be > 0"));
                }
                Primitive {
                    name: name.clone(),
                    shape: Shape::Box {
                        center: *center,
                        size: *size,
                        rotation_y_deg: *rotation_y_deg,
                    },
                    material: material.clone(),
                }
            }
        });
    }

    let targets = doc
        .targets
        .iter()
        .map(|t| match t {
            TargetDoc::Mcc {
                center,
                size,
                normal,
                up,
                margin_reflectance,
            } => Target::Mcc {
                center: *center,
                size: *size,
                normal: *normal,
                up: *up,
                margin_reflectance: *margin_reflectance,
            },
            TargetDoc::SlantedEdge {
                center,
                size,
                angle_deg,
                normal,
                up,
                dark_reflectance,
                light_reflectance,
            } => Target::SlantedEdge {
                center: *center,
                size: *size,
                angle_deg: *angle_deg,
                normal: *normal,
                up: *up,
                dark_reflectance: *dark_reflectance,
                light_reflectance: *light_reflectance,
            },
        })
        .collect();

    let scene = SceneGraph {
        grid: loader.grid,
        materials,
        lights,
        primitives,
        camera,
        targets,
    };
    scene.validate().map_err(|e| match e {
        Error::Geometry { primitive, reason } => parse_err(primitive, reason),
        other => other,
    })?;
    Ok(scene)
}

fn samples(s: &SpectralDistribution) -> SpectrumDoc {
    SpectrumDoc::Samples(s.grid().wavelengths().zip(s.values()).map(|(w, v)| [w, *v]).collect())
}

/// Serialize a scene with every spectrum written inline.
pub fn serialize_scene(scene: &SceneGraph) -> String {
    let c = &scene.camera;
    let doc = SceneDoc {
        camera: CameraDoc {
            position: c.position,
            look_at: c.look_at,
            up: c.up,
            focal_length_mm: c.focal_length_mm,
            sensor_width_mm: c.sensor_width_mm,
            sensor_height_mm: c.sensor_height_mm,
            resolution: c.resolution,
        },
        materials: scene
            .materials
            .iter()
            .map(|(k, m)| (k.clone(), samples(&m.reflectance)))
            .collect(),
        lights: scene
            .lights
            .iter()
            .map(|l| LightDoc {
                name: l.name.clone(),
                corners: l.quad.corners(),
                spd: samples(&l.spd),
                two_sided: l.two_sided,
                material: l.material.clone(),
            })
            .collect(),
        primitives: scene
            .primitives
            .iter()
            .map(|p| match &p.shape {
                Shape::Quad(q) => PrimitiveDoc::Quad {
                    name: p.name.clone(),
                    corners: q.corners(),
                    material: p.material.clone(),
                },
                Shape::Box {
                    center,
                    size,
                    rotation_y_deg,
                } => PrimitiveDoc::Box {
                    name: p.name.clone(),
                    center: *center,
                    size: *size,
                    rotation_y_deg: *rotation_y_deg,
                    material: p.material.clone(),
                },
            })
            .collect(),
        targets: scene
            .targets
            .iter()
            .map(|t| match t {
                Target::Mcc {
                    center,
                    size,
                    normal,
                    up,
                    margin_reflectance,
                } => TargetDoc::Mcc {
                    center: *center,
                    size: *size,
                    normal: *normal,
                    up: *up,
                    margin_reflectance: *margin_reflectance,
                },
                Target::SlantedEdge {
                    center,
                    size,
                    angle_deg,
                    normal,
                    up,
                    dark_reflectance,
                    light_reflectance,
                } => TargetDoc::SlantedEdge {
                    center: *center,
                    size: *size,
                    angle_deg: *angle_deg,
                    normal: *normal,
                    up: *up,
                    dark_reflectance: *dark_reflectance,
                    light_reflectance: *light_reflectance,
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("scene documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_cornell_box, place_mcc, place_slanted_edge, CornellBoxParams, MccPosition};

    fn quads_match(a: &SceneGraph, b: &SceneGraph) -> bool {
        // Quads are rebuilt from corners, so compare geometry with a tolerance.
        let close = |p: Vec3, q: Vec3| (p - q).length() < 1e-12;
        a.primitives.iter().zip(&b.primitives).all(|(p, q)| {
            p.name == q.name
                && p.material == q.material
                && p.shape
                    .quads()
                    .iter()
                    .zip(q.shape.quads())
                    .all(|(x, y)| x.corners().iter().zip(y.corners()).all(|(u, v)| close(*u, v)))
        })
    }

    #[test]
    fn round_trip_default_box() {
        let scene = build_cornell_box(&CornellBoxParams::default()).unwrap();
        let scene = place_mcc(&scene, MccPosition::Left.center(0.55, 0.25), 0.25).unwrap();
        let scene = place_slanted_edge(&scene, Vec3::new(0.0, 0.2, -0.2), 0.1, 5.0).unwrap();
        let text = serialize_scene(&scene);
        let back = parse_scene(&text).unwrap();
        assert_eq!(back.materials, scene.materials);
        assert_eq!(back.camera, scene.camera);
        assert_eq!(back.targets, scene.targets);
        assert!(quads_match(&back, &scene));
        assert_eq!(back.lights.len(), 1);
        assert_eq!(back.lights[0].spd, scene.lights[0].spd);
        // A second pass is byte-stable.
        assert_eq!(serialize_scene(&back), text);
    }

    fn minimal(extra: &str) -> String {
        format!(
            r#"{{
            "camera": {{"position": [0, 0.2, 1], "look_at": [0, 0.2, 0], "up": [0, 1, 0],
                        "focal_length_mm": 4, "sensor_width_mm": 4, "sensor_height_mm": 3,
                        "resolution": [40, 30]}},
            "materials": {{"white": [[400, 0.8], [700, 0.8]]}},
            "lights": [{{"name": "l", "corners": [[0,1,0],[1,1,0],[1,1,1],[0,1,1]],
                         "spd": [[400, 1], [700, 1]]}}],
            "primitives": [{{"type": "quad", "name": "floor",
                             "corners": [[0,0,0],[1,0,0],[1,0,1],[0,0,1]], "material": "white"}}]
            {extra}
        }}"#
        )
    }

    #[test]
    fn parses_minimal_document() {
        let s = parse_scene(&minimal("")).unwrap();
        assert_eq!(s.materials["white"].reflectance.values()[15], 0.8);
        assert_eq!(s.primitives.len(), 1);
    }

    #[test]
    fn missing_camera() {
        let doc = r#"{"materials": {}, "lights": [], "primitives": []}"#;
        let e = parse_scene(doc).unwrap_err().to_string();
        assert!(e.contains("camera required"), "{e}");
    }

    #[test]
    fn reflectance_out_of_range() {
        let doc = minimal("").replace("[700, 0.8]", "[700, 1.3]");
        let e = parse_scene(&doc).unwrap_err().to_string();
        assert!(e.contains("reflectance out of range"), "{e}");
        assert!(e.contains("materials.white"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let e = parse_scene(&minimal(r#", "extra": 1"#)).unwrap_err().to_string();
        assert!(e.contains("extra"), "{e}");
        let doc = minimal("")
            .replace("\"two_sided\"", "\"x\"")
            .replace("\"name\": \"l\",", "\"name\": \"l\", \"bogus\": true,");
        let e = parse_scene(&doc).unwrap_err().to_string();
        assert!(e.contains("lights[0]") || e.contains("lights.0"), "{e}");
    }

    #[test]
    fn unknown_material_reference() {
        let doc = minimal("").replace("\"material\": \"white\"", "\"material\": \"chrome\"");
        let e = parse_scene(&doc).unwrap_err().to_string();
        assert!(e.contains("chrome"), "{e}");
    }

    #[test]
    fn csv_material_relative_to_base() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("w.csv"), "wavelength_nm,value\n400,0.5\n700,0.5\n").unwrap();
        let doc = minimal("").replace("[[400, 0.8], [700, 0.8]]", "\"w.csv\"");
        let s = parse_scene_with_base(&doc, Some(dir.path())).unwrap();
        assert_eq!(s.materials["white"].reflectance.values()[0], 0.5);
    }
}
