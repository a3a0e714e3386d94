//! Validation tools: demosaicking, slanted-edge MTF, the QE-transform fit and
//! region statistics.

mod demosaic;
mod mtf;
pub mod qe;
mod stats;

pub use demosaic::{demosaic_bilinear, RgbImage};
pub use mtf::{locate_edge, slanted_edge_mtf, slanted_edge_mtf_with_edge, EdgeFit, MtfCurve, DEFAULT_OVERSAMPLE};
pub use qe::{solve_qe_transform, solve_qe_transform_sparse, QeFit, QeTransform};
pub use stats::{line_profile, linear_fit, raw_region_stats, region_stats, LineFit, LineProfile, RegionStats, Roi};
