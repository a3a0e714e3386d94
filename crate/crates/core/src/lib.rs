pub mod analysis;
pub mod cube;
pub mod data;
pub mod error;
mod fft;
pub mod geometry;
pub mod optics;
pub mod pipeline;
pub mod radiometry;
pub mod render;
pub mod rng;
pub mod scene;
pub mod sensor;
pub mod spectra;
pub mod svg;
