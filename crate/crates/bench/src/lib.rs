//! Shared input builders for the criterion benchmarks.

use ostce_core::preprocess::RasterImage;
use ostce_core::synth;

/// Display panel size per eye on the reference headset.
pub const FRAME_WIDTH: usize = 1268;
pub const FRAME_HEIGHT: usize = 720;

pub fn bench_background() -> RasterImage {
    synth::hue_sweep(FRAME_WIDTH, FRAME_HEIGHT)
}

pub fn bench_virtual(coverage_percent: f64) -> RasterImage {
    synth::coverage_frame(FRAME_WIDTH, FRAME_HEIGHT, coverage_percent)
}
