//! Scenes and configurations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use camsim_core::geometry::Vec3;
use camsim_core::radiometry::{SpectralDistribution, SpectralUnit, WavelengthGrid};
use camsim_core::scene::{
    box_faces, build_cornell_box, place_slanted_edge, AreaLight, CornellBoxParams, MatteMaterial, PinholeCamera,
    SceneGraph,
};
use camsim_core::sensor::{QeCurves, SensorConfig};

pub const PITCH_UM: f64 = 1.4;
pub const EDGE_NM: f64 = 550.0;

/// Closed cube whose six inward faces all emit `le` and reflect `rho`,
/// viewed from the centre.
pub fn furnace_scene(rho: f64, le: f64, resolution: [usize; 2]) -> SceneGraph {
    let grid = WavelengthGrid::visible();
    let mut materials = BTreeMap::new();
    materials.insert(
        "wall".to_string(),
        MatteMaterial::new(SpectralDistribution::constant(grid, rho, SpectralUnit::Reflectance).unwrap()).unwrap(),
    );
    let spd = SpectralDistribution::constant(grid, le, SpectralUnit::Radiance).unwrap();
    let lights = box_faces(Vec3::new(0.0, 0.0, 0.0), [1.0, 1.0, 1.0], 0.0)
        .iter()
        .enumerate()
        .map(|(i, q)| AreaLight {
            name: format!("wall{i}"),
            quad: q.flipped(),
            spd: spd.clone(),
            two_sided: false,
            material: Some("wall".into()),
        })
        .collect();
    let camera = PinholeCamera {
        position: Vec3::new(0.0, 0.0, 0.0),
        look_at: Vec3::new(0.0, 0.0, -1.0),
        up: Vec3::new(0.0, 1.0, 0.0),
        focal_length_mm: 4.0,
        sensor_width_mm: 4.0 * resolution[0] as f64 / resolution[1] as f64,
        sensor_height_mm: 4.0,
        resolution,
    };
    let scene = SceneGraph {
        grid,
        materials,
        lights,
        primitives: Vec::new(),
        camera,
        targets: Vec::new(),
    };
    scene.validate().unwrap();
    scene
}

/// Empty Cornell box lit at a single wavelength, with a slanted-edge target
/// 0.5 m in front of an `n × n` camera of `PITCH_UM` pixels.
pub fn edge_scene(n: usize, angle_deg: f64) -> SceneGraph {
    let grid = WavelengthGrid::visible();
    let mut spd = vec![0.0; grid.count()];
    spd[grid.index_of(EDGE_NM).unwrap()] = 10.0;
    let center = Vec3::new(0.0, 0.275, -0.45);
    let params = CornellBoxParams {
        blocks: Vec::new(),
        light_spd: SpectralDistribution::new(grid, spd, SpectralUnit::Radiance).unwrap(),
        camera: PinholeCamera {
            position: center + Vec3::new(0.0, 0.0, 0.5),
            look_at: center,
            up: Vec3::new(0.0, 1.0, 0.0),
            focal_length_mm: 4.38,
            sensor_width_mm: n as f64 * PITCH_UM * 1e-3,
            sensor_height_mm: n as f64 * PITCH_UM * 1e-3,
            resolution: [n, n],
        },
        ..CornellBoxParams::default()
    };
    let scene = build_cornell_box(&params).unwrap();
    place_slanted_edge(&scene, center, 0.1, angle_deg).unwrap()
}

/// Sensor with every noise source off and identical, flat channel QE.
pub fn noiseless_sensor(width: usize, height: usize) -> SensorConfig {
    let grid = WavelengthGrid::visible();
    SensorConfig {
        width,
        height,
        dsnu_mv: 0.0,
        prnu_percent: 0.0,
        read_noise_mv: 0.0,
        photon_noise: false,
        qe: QeCurves::uniform(SpectralDistribution::constant(grid, 0.5, SpectralUnit::QuantumEfficiency).unwrap()),
        ..SensorConfig::default()
    }
}
