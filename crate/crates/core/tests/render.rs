mod common;

use proptest::prelude::*;

use camsim_core::geometry::Vec3;
use camsim_core::render::{render, Integrator, RenderConfig};
use camsim_core::scene::{build_cornell_box, CornellBoxParams, PinholeCamera};

use common::furnace_scene;

fn stats(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

#[test]
fn furnace_error_shrinks_as_inverse_sqrt_spp() {
    let scene = furnace_scene(0.5, 1.0, [16, 12]);
    let rms: Vec<f64> = [16u32, 64, 256]
        .iter()
        .map(|&spp| {
            let cfg = RenderConfig {
                samples_per_pixel: spp,
                max_depth: 64,
                seed: 5,
                ..RenderConfig::default()
            };
            let cube = render(&scene, &cfg).unwrap();
            let band = cube.plane(10);
            (band.iter().map(|v| (v - 2.0).powi(2)).sum::<f64>() / band.len() as f64).sqrt()
        })
        .collect();
    // Each 4× in samples halves the error.
    for w in rms.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.35..0.7).contains(&ratio), "{rms:?}");
    }
}

#[test]
fn truncated_furnace_is_partial_neumann_sum() {
    // With vertices capped at k and no roulette, L = L_e·Σ_{i≤k} ρ^i.
    for depth in 1..=3u32 {
        let scene = furnace_scene(0.5, 1.0, [8, 6]);
        let cfg = RenderConfig {
            samples_per_pixel: 128,
            max_depth: depth,
            russian_roulette_start_depth: 100,
            seed: 2,
        };
        let cube = render(&scene, &cfg).unwrap();
        let (m, s) = stats(cube.plane(0));
        let want: f64 = (0..=depth).map(|i| 0.5f64.powi(i as i32)).sum();
        let sigma = s / (cube.plane(0).len() as f64).sqrt();
        assert!((m - want).abs() <= 4.0 * sigma + 1e-12, "depth {depth}: {m} vs {want}");
    }
}

#[test]
fn identical_config_is_bitwise_identical_across_thread_counts() {
    let mut params = CornellBoxParams::default();
    params.camera.resolution = [24, 18];
    let scene = build_cornell_box(&params).unwrap();
    let cfg = RenderConfig {
        samples_per_pixel: 4,
        seed: 17,
        ..RenderConfig::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| render(&scene, &cfg).unwrap())
    };
    let a = run(1);
    for t in [2, 3] {
        assert!(a.data() == run(t).data(), "{t} threads");
    }
}

#[test]
fn left_block_left_face_is_redder_than_its_front() {
    let scene = build_cornell_box(&CornellBoxParams::default()).unwrap();
    let expanded = scene.expand().unwrap();
    let faces: Vec<usize> = expanded
        .surfaces
        .iter()
        .enumerate()
        .filter(|(_, s)| s.name == "tall_block")
        .map(|(i, _)| i)
        .collect();
    let most = |dir: Vec3| {
        *faces
            .iter()
            .max_by(|&&a, &&b| {
                let na = expanded.surfaces[a].quad.normal().dot(dir);
                let nb = expanded.surfaces[b].quad.normal().dot(dir);
                na.total_cmp(&nb)
            })
            .unwrap()
    };
    let (left, front) = (most(Vec3::new(-1.0, 0.0, 0.0)), most(Vec3::new(0.0, 0.0, 1.0)));
    assert_ne!(left, front);
    let integrator = Integrator::new(&expanded, RenderConfig::default());
    let grid = expanded.grid;
    let band = |l: &[f64], lo: f64, hi: f64| {
        grid.wavelengths()
            .zip(l)
            .filter(|(nm, _)| (lo..=hi).contains(nm))
            .map(|(_, v)| v)
            .sum::<f64>()
    };
    let rg = |face: usize| {
        // Average a few points over the face to smooth out local shadows.
        let mut r = 0.0;
        let mut g = 0.0;
        for (i, (s, u)) in [(0.3, 0.3), (0.7, 0.3), (0.3, 0.7), (0.7, 0.7), (0.5, 0.5)]
            .iter()
            .enumerate()
        {
            let l = integrator.surface_radiance(face, *s, *u, 4096, 40 + i as u64);
            r += band(&l, 600.0, 700.0);
            g += band(&l, 500.0, 570.0);
        }
        r / g
    };
    let (l, f) = (rg(left), rg(front));
    assert!(l > f, "left {l} vs front {f}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radiance_is_non_negative(seed in 0u64..10_000, x in -0.2f64..0.2, y in 0.1f64..0.45) {
        let mut params = CornellBoxParams::default();
        params.camera = PinholeCamera {
            position: Vec3::new(x, y, 0.9),
            look_at: Vec3::new(0.0, 0.275, -0.275),
            resolution: [12, 9],
            ..PinholeCamera::default()
        };
        let scene = build_cornell_box(&params).unwrap();
        let cfg = RenderConfig { samples_per_pixel: 2, seed, ..RenderConfig::default() };
        let cube = render(&scene, &cfg).unwrap();
        prop_assert!(cube.data().iter().all(|v| *v >= 0.0 && v.is_finite()));
    }
}
