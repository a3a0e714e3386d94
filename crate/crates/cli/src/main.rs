use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use camsim_core::optics::OpticsConfig;
use camsim_core::pipeline::{run_pipeline, PipelineManifest};
use camsim_core::render::RenderConfig;
use camsim_core::scene::{
    build_cornell_box, place_mcc, place_slanted_edge, serialize_scene, CornellBoxParams, MccPosition, MCC_DEFAULT_SIZE,
};
use camsim_core::sensor::SensorConfig;

mod analyze;

/// Default output directory when `--out` is not given.
pub const OUT_ENV: &str = "CAMSIM_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "camsim",
    version,
    about = "Spectral camera simulation: scene, render, optics, sensor, analysis"
)]
struct Cli {
    /// Override the render and sensor-noise seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a Cornell-box scene and write it as JSON.
    Scene(SceneArgs),
    /// Execute a pipeline manifest.
    Run(RunArgs),
    /// Measurements on simulated (or captured) images.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCommand),
    /// Configuration helpers.
    #[command(subcommand)]
    Config(ConfigCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MccArg {
    Left,
    Center,
    Right,
}

#[derive(Args, Debug)]
struct SceneArgs {
    /// Scene file to write; relative paths go under the output directory.
    #[arg(short, long)]
    output: PathBuf,
    /// Place a ColorChecker against the back wall.
    #[arg(long, value_enum)]
    mcc: Option<MccArg>,
    /// Chart width in metres.
    #[arg(long, default_value_t = MCC_DEFAULT_SIZE)]
    mcc_size: f64,
    /// Place a slanted-edge target in front of the camera.
    #[arg(long, conflicts_with = "mcc")]
    slanted_edge: bool,
    /// Camera-to-target distance in metres (slanted edge only).
    #[arg(long, default_value_t = 0.5, requires = "slanted_edge")]
    distance: f64,
    /// Edge tilt in degrees.
    #[arg(long, default_value_t = 5.0)]
    edge_angle: f64,
    /// Edge target side in metres.
    #[arg(long, default_value_t = 0.1)]
    edge_size: f64,
    /// Camera resolution as WIDTHxHEIGHT.
    #[arg(long, value_parser = parse_resolution)]
    resolution: Option<[usize; 2]>,
}

#[derive(Args, Debug)]
struct RunArgs {
    manifest: PathBuf,
    /// Scale the rendered radiance to this mean luminance (cd/m²).
    #[arg(long)]
    luminance: Option<f64>,
    /// Override samples per pixel.
    #[arg(long)]
    spp: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum ConfigCommand {
    /// Print default configuration as JSON.
    PrintDefaults {
        #[arg(value_enum, default_value = "manifest")]
        which: DefaultsKind,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DefaultsKind {
    Render,
    Optics,
    Sensor,
    Manifest,
}

fn parse_resolution(s: &str) -> std::result::Result<[usize; 2], String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("resolution must be at least 1x1".into());
    }
    Ok([w, h])
}

/// Context shared by every subcommand.
pub struct Global {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Global {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// `path` if absolute, otherwise under the output directory.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out_dir().join(path)
        }
    }

    pub fn write(&self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf> {
        let dir = self.out_dir();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn cmd_scene(g: &Global, a: &SceneArgs) -> Result<()> {
    let mut params = CornellBoxParams::default();
    if let Some(res) = a.resolution {
        let cam = &mut params.camera;
        let pitch = cam.sensor_width_mm / cam.resolution[0] as f64;
        cam.resolution = res;
        cam.sensor_width_mm = pitch * res[0] as f64;
        cam.sensor_height_mm = pitch * res[1] as f64;
    }
    let box_size = params.box_size;
    if a.slanted_edge {
        // Target at mid depth; the camera backs off to the requested distance.
        if !(a.distance.is_finite() && a.distance > 0.0) {
            bail!("distance must be > 0");
        }
        let target_z = -0.5 * box_size;
        let cam = &mut params.camera;
        cam.position.z = target_z + a.distance;
        cam.look_at.z = target_z;
    }
    let mut scene = build_cornell_box(&params)?;
    if let Some(m) = a.mcc {
        let pos = match m {
            MccArg::Left => MccPosition::Left,
            MccArg::Center => MccPosition::Center,
            MccArg::Right => MccPosition::Right,
        };
        scene = place_mcc(&scene, pos.center(box_size, a.mcc_size), a.mcc_size)?;
    }
    if a.slanted_edge {
        let center = scene.camera.look_at;
        scene = place_slanted_edge(&scene, center, a.edge_size, a.edge_angle)?;
    }
    let path = g.resolve(&a.output);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, serialize_scene(&scene)).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_run(g: &Global, a: &RunArgs) -> Result<()> {
    let mut m = PipelineManifest::load(&a.manifest).with_context(|| format!("loading {}", a.manifest.display()))?;
    if let Some(out) = &g.out {
        m.out_dir = out.clone();
    }
    if let Some(seed) = g.seed {
        m.render.seed = seed;
        m.sensor.noise_seed = seed;
    }
    if let Some(l) = a.luminance {
        m.luminance_cd_m2 = Some(l);
    }
    if let Some(spp) = a.spp {
        m.render.samples_per_pixel = spp;
    }
    match run_pipeline(&m) {
        Ok(report) => {
            for p in &report.artifacts {
                println!("{}", p.display());
            }
            println!("{}", report.provenance.display());
            Ok(())
        }
        Err(f) => {
            for p in &f.partial {
                eprintln!("partial: {}", p.display());
            }
            Err(f.into())
        }
    }
}

fn cmd_config(c: &ConfigCommand) -> Result<()> {
    let ConfigCommand::PrintDefaults { which } = c;
    let text = match which {
        DefaultsKind::Render => serde_json::to_string_pretty(&RenderConfig::default())?,
        DefaultsKind::Optics => serde_json::to_string_pretty(&OpticsConfig::default())?,
        DefaultsKind::Sensor => SensorConfig::default().to_json(),
        DefaultsKind::Manifest => PipelineManifest {
            scene: "scene.json".into(),
            render: RenderConfig::default(),
            optics: OpticsConfig::default(),
            sensor: SensorConfig::default(),
            out_dir: "out".into(),
            stages: camsim_core::pipeline::Stage::ALL.to_vec(),
            luminance_cd_m2: None,
        }
        .to_json(),
    };
    println!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let g = Global {
        seed: cli.seed,
        out: cli.out,
    };
    let result = match &cli.command {
        Command::Scene(a) => cmd_scene(&g, a),
        Command::Run(a) => cmd_run(&g, a),
        Command::Analyze(a) => analyze::run(&g, a),
        Command::Config(c) => cmd_config(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
