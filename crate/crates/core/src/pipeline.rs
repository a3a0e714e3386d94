//! Manifest-driven scene → render → optics → sensor → analysis runs that
//! write their artifacts and a provenance sidecar to an output directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{demosaic_bilinear, region_stats, Roi};
use crate::error::{Error, Result};
use crate::optics::{radiance_to_irradiance, OpticsConfig};
use crate::render::{mean_luminance, render_supersampled, scale_to_luminance, RenderConfig};
use crate::scene::{parse_scene_with_base, serialize_scene};
use crate::sensor::{expose, make_fixed_patterns, SensorConfig};

pub const PARTIAL_SUFFIX: &str = ".partial";
pub const PROVENANCE_FILE: &str = "provenance.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Scene,
    Render,
    Optics,
    Sensor,
    Analysis,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Scene,
        Stage::Render,
        Stage::Optics,
        Stage::Sensor,
        Stage::Analysis,
    ];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Scene => "scene",
            Stage::Render => "render",
            Stage::Optics => "optics",
            Stage::Sensor => "sensor",
            Stage::Analysis => "analysis",
        })
    }
}

fn all_stages() -> Vec<Stage> {
    Stage::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineManifest {
    /// Scene JSON; relative paths resolve against the manifest's directory.
    pub scene: PathBuf,
    #[serde(default)]
    pub render: RenderConfig,
    #[serde(default)]
    pub optics: OpticsConfig,
    #[serde(default)]
    pub sensor: SensorConfig,
    pub out_dir: PathBuf,
    #[serde(default = "all_stages")]
    pub stages: Vec<Stage>,
    /// Rescale the rendered radiance to this mean luminance (cd/m²).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub luminance_cd_m2: Option<f64>,
}

impl PipelineManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config(format!("manifest {}: {}", e.path(), e.inner())))
    }

    /// Load and resolve relative `scene`/`out_dir` against the file's folder.
    pub fn load(path: &Path) -> Result<Self> {
        let mut m = Self::from_json(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if m.scene.is_relative() {
            m.scene = base.join(&m.scene);
        }
        if m.out_dir.is_relative() {
            m.out_dir = base.join(&m.out_dir);
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() || self.stages[..] != Stage::ALL[..self.stages.len()] {
            let got: Vec<String> = self.stages.iter().map(Stage::to_string).collect();
            return Err(Error::Config(format!(
                "stages [{}] are not a prefix of scene, render, optics, sensor, analysis",
                got.join(", ")
            )));
        }
        if !self.scene.is_file() {
            return Err(Error::Config(format!(
                "scene file {} does not exist",
                self.scene.display()
            )));
        }
        if let Some(l) = self.luminance_cd_m2 {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Config(format!("luminance {l} must be ≥ 0")));
            }
        }
        self.render.validate()?;
        self.optics.validate()?;
        self.sensor.validate()?;
        Ok(())
    }

    fn runs(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }
}

/// Files produced by a successful run, in the order they were written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub artifacts: Vec<PathBuf>,
    pub provenance: PathBuf,
}

#[derive(Debug)]
pub struct RunFailure {
    pub stage: Option<Stage>,
    pub error: Error,
    /// Artifacts renamed with [`PARTIAL_SUFFIX`].
    pub partial: Vec<PathBuf>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(s) => write!(f, "stage {s} failed: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn config_hash<T: Serialize>(v: &T) -> String {
    sha256_hex(serde_json::to_string(v).expect("config serializes").as_bytes())
}

#[derive(Serialize)]
struct ArtifactRecord {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    status: &'a str,
    stages: &'a [Stage],
    seeds: Seeds,
    config_sha256: Hashes,
    luminance_cd_m2: Option<f64>,
    rendered_luminance_cd_m2: Option<f64>,
    artifacts: Vec<ArtifactRecord>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Seeds {
    render: u64,
    sensor_pattern: u64,
    sensor_noise: u64,
}

#[derive(Serialize)]
struct Hashes {
    scene: String,
    render: String,
    optics: String,
    sensor: String,
}

struct Run<'a> {
    m: &'a PipelineManifest,
    written: Vec<(PathBuf, String)>,
    scene_hash: String,
    rendered_luminance: Option<f64>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.m.out_dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push((path, sha256_hex(bytes)));
        Ok(())
    }

    fn provenance(&self, status: &str, error: Option<String>) -> String {
        let m = self.m;
        let p = Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            status,
            stages: &m.stages,
            seeds: Seeds {
                render: m.render.seed,
                sensor_pattern: m.sensor.pattern_seed,
                sensor_noise: m.sensor.noise_seed,
            },
            config_sha256: Hashes {
                scene: self.scene_hash.clone(),
                render: config_hash(&m.render),
                optics: config_hash(&m.optics),
                sensor: config_hash(&m.sensor),
            },
            luminance_cd_m2: m.luminance_cd_m2,
            rendered_luminance_cd_m2: self.rendered_luminance,
            artifacts: self
                .written
                .iter()
                .map(|(p, h)| ArtifactRecord {
                    file: p
                        .file_name()
                        .map(|f| f.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    sha256: h.clone(),
                })
                .collect(),
            error,
        };
        serde_json::to_string_pretty(&p).expect("provenance serializes") + "\n"
    }
}

/// Execute the manifest's stages. On failure every artifact written so far,
/// and the provenance record, carry the `.partial` suffix.
pub fn run_pipeline(m: &PipelineManifest) -> std::result::Result<RunReport, RunFailure> {
    let fail = |stage, error| RunFailure {
        stage,
        error,
        partial: Vec::new(),
    };
    m.validate().map_err(|e| fail(None, e))?;
    fs::create_dir_all(&m.out_dir).map_err(|e| fail(None, e.into()))?;
    let mut run = Run {
        m,
        written: Vec::new(),
        scene_hash: String::new(),
        rendered_luminance: None,
    };
    let mut stage = Stage::Scene;
    let result = execute(&mut run, &mut stage);
    match result {
        Ok(()) => {
            let prov = m.out_dir.join(PROVENANCE_FILE);
            fs::write(&prov, run.provenance("ok", None)).map_err(|e| fail(None, e.into()))?;
            Ok(RunReport {
                artifacts: run.written.into_iter().map(|(p, _)| p).collect(),
                provenance: prov,
            })
        }
        Err(error) => {
            let mut partial = Vec::new();
            for (p, _) in &run.written {
                let mut name = p.clone().into_os_string();
                name.push(PARTIAL_SUFFIX);
                let target = PathBuf::from(name);
                if fs::rename(p, &target).is_ok() {
                    partial.push(target);
                }
            }
            let prov = m.out_dir.join(format!("{PROVENANCE_FILE}{PARTIAL_SUFFIX}"));
            let text = run.provenance("failed", Some(format!("stage {stage}: {error}")));
            if fs::write(&prov, text).is_ok() {
                partial.push(prov);
            }
            Err(RunFailure {
                stage: Some(stage),
                error,
                partial,
            })
        }
    }
}

fn execute(run: &mut Run<'_>, stage: &mut Stage) -> Result<()> {
    let m = run.m;
    *stage = Stage::Scene;
    let text = fs::read_to_string(&m.scene)?;
    let scene = parse_scene_with_base(&text, m.scene.parent())?;
    let canonical = serialize_scene(&scene);
    run.scene_hash = sha256_hex(canonical.as_bytes());
    run.write("scene.json", canonical.as_bytes())?;
    if !m.runs(Stage::Render) {
        return Ok(());
    }

    *stage = Stage::Render;
    let [cw, ch] = scene.camera.resolution;
    if m.runs(Stage::Sensor) && (cw != m.sensor.width || ch != m.sensor.height) {
        return Err(Error::DimensionMismatch(format!(
            "camera resolution {cw}×{ch} differs from sensor {}×{}",
            m.sensor.width, m.sensor.height
        )));
    }
    let mut radiance = render_supersampled(&scene, &m.render, m.optics.binning)?;
    if let Some(target) = m.luminance_cd_m2 {
        radiance = scale_to_luminance(&radiance, target)?;
    }
    run.rendered_luminance = Some(mean_luminance(&radiance)?);
    run.write("radiance.raster", &radiance.to_bytes())?;
    if !m.runs(Stage::Optics) {
        return Ok(());
    }

    *stage = Stage::Optics;
    let irradiance = radiance_to_irradiance(&radiance, &m.optics)?;
    drop(radiance);
    run.write("irradiance.raster", &irradiance.to_bytes())?;
    if !m.runs(Stage::Sensor) {
        return Ok(());
    }

    *stage = Stage::Sensor;
    let patterns = make_fixed_patterns(&m.sensor);
    let raw = expose(&irradiance, &m.sensor, &patterns)?;
    run.write("raw.pgm", &raw.to_pgm_bytes())?;
    if !m.runs(Stage::Analysis) {
        return Ok(());
    }

    *stage = Stage::Analysis;
    let rgb = demosaic_bilinear(&raw)?;
    run.write("preview.ppm", &rgb.to_ppm_preview(preview_white(&rgb)))?;
    let stats = region_stats(&rgb, Roi::new(0, 0, rgb.width, rgb.height))?;
    let csv = format!("{}\n{}", crate::analysis::RegionStats::csv_header(), stats.csv_rows());
    run.write("frame_stats.csv", csv.as_bytes())?;
    Ok(())
}

/// White level for the preview: the 99th percentile, so a visible light
/// source does not push the rest of the frame to black.
fn preview_white(rgb: &crate::analysis::RgbImage) -> f64 {
    let mut v: Vec<f64> = rgb.data.iter().flatten().copied().collect();
    let k = (v.len() * 99 / 100).min(v.len() - 1);
    let (_, p, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    p.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(dir: &Path) -> PipelineManifest {
        PipelineManifest {
            scene: dir.join("scene.json"),
            render: RenderConfig::default(),
            optics: OpticsConfig::default(),
            sensor: SensorConfig::default(),
            out_dir: dir.join("out"),
            stages: all_stages(),
            luminance_cd_m2: None,
        }
    }

    #[test]
    fn stage_prefix_rule() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("scene.json"), "{}").unwrap();
        let mut m = manifest(dir.path());
        assert!(m.validate().is_ok());
        m.stages = vec![Stage::Scene, Stage::Render];
        assert!(m.validate().is_ok());
        m.stages = vec![Stage::Render, Stage::Optics];
        assert!(m.validate().is_err());
        m.stages = vec![Stage::Scene, Stage::Optics];
        assert!(m.validate().is_err());
        m.stages.clear();
        assert!(m.validate().is_err());
    }

    #[test]
    fn missing_scene_file() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest(dir.path());
        assert!(matches!(m.validate(), Err(Error::Config(s)) if s.contains("does not exist")));
    }

    #[test]
    fn json_defaults_and_unknown_fields() {
        let m = PipelineManifest::from_json(r#"{"scene": "s.json", "out_dir": "o"}"#).unwrap();
        assert_eq!(m.stages, all_stages());
        assert_eq!(m.render, RenderConfig::default());
        let back = PipelineManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let err = PipelineManifest::from_json(r#"{"scene": "s", "out_dir": "o", "render": {"spp": 4}}"#).unwrap_err();
        assert!(err.to_string().contains("render"), "{err}");
    }

    #[test]
    fn failing_stage_leaves_partial_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let scene = crate::scene::build_cornell_box(&Default::default()).unwrap();
        fs::write(dir.path().join("scene.json"), serialize_scene(&scene)).unwrap();
        let mut m = manifest(dir.path());
        m.render.samples_per_pixel = 1;
        // Sensor size disagrees with the camera: render refuses to start.
        m.sensor.width = 64;
        let err = run_pipeline(&m).unwrap_err();
        assert_eq!(err.stage, Some(Stage::Render));
        let out = dir.path().join("out");
        assert!(out.join("scene.json.partial").is_file());
        assert!(out.join("provenance.json.partial").is_file());
        assert!(!out.join("scene.json").exists());
    }
}
