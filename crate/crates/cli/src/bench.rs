//! Throughput benchmark following the headset measurement protocol:
//! display-sized frames, foreground coverage swept 0–100% in steps of 10,
//! ten timed samples per step, per-stage wall time with mean and min/max.

use serde::{Deserialize, Serialize};

use ostce_core::preprocess::RasterImage;
use ostce_core::synth;

use crate::config::{Method, RunConfig};
use crate::error::CliError;
use crate::pipeline::{prepare_background, run_method};

/// Display panel size per eye.
pub const BENCH_WIDTH: usize = 1268;
pub const BENCH_HEIGHT: usize = 720;
pub const BENCH_SAMPLES: usize = 10;
pub const COVERAGE_STEP: usize = 10;

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct StageStats {
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl StageStats {
    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        Self {
            mean_ms: samples.iter().sum::<f64>() / n,
            min_ms: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max_ms: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageBench {
    pub coverage_percent: f64,
    pub foreground_pixels: u64,
    pub samples: u32,
    pub preprocess: StageStats,
    pub enhance: StageStats,
    pub blend: StageStats,
    pub evaluate: StageStats,
    /// preprocess + enhance + blend: the rendering path a headset would run
    /// per frame. Evaluation is offline diagnostics and excluded.
    pub end_to_end: StageStats,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub samples_per_coverage: u32,
    pub entries: Vec<CoverageBench>,
}

/// Runs the sweep. Inputs are synthesized: a hue-sweep background and
/// coverage frames filled row-major with varied colors.
pub fn run_bench_protocol(
    cfg: &RunConfig,
    width: usize,
    height: usize,
    samples: usize,
) -> Result<BenchReport, CliError> {
    let bg = synth::hue_sweep(width, height);
    let mut entries = Vec::new();

    // Global warmup: fault in buffers, build the conversion tables, spin up
    // the worker pool.
    {
        let virt = synth::coverage_frame(width, height, 100.0);
        let prepared = prepare_background(&bg, cfg, width, height);
        let _ = run_method(Method::Ours, &virt, &prepared, cfg)?;
    }

    for coverage in (0..=100).step_by(COVERAGE_STEP) {
        let virt = synth::coverage_frame(width, height, coverage as f64);
        let fg_pixels = count_foreground(&virt);

        // One warmup pass per coverage so allocators and caches settle.
        let prepared = prepare_background(&bg, cfg, width, height);
        let _ = run_method(Method::Ours, &virt, &prepared, cfg)?;

        let mut pre = Vec::with_capacity(samples);
        let mut enh = Vec::with_capacity(samples);
        let mut blend = Vec::with_capacity(samples);
        let mut eval = Vec::with_capacity(samples);
        let mut total = Vec::with_capacity(samples);
        for _ in 0..samples {
            let prepared = prepare_background(&bg, cfg, width, height);
            let artifacts = run_method(Method::Ours, &virt, &prepared, cfg)?;
            let timing = artifacts
                .report
                .timing_ms
                .expect("run_method fills timings");
            pre.push(timing.preprocess);
            enh.push(timing.enhance);
            blend.push(timing.blend);
            eval.push(timing.evaluate);
            total.push(timing.preprocess + timing.enhance + timing.blend);
        }

        entries.push(CoverageBench {
            coverage_percent: coverage as f64,
            foreground_pixels: fg_pixels,
            samples: samples as u32,
            preprocess: StageStats::from_samples(&pre),
            enhance: StageStats::from_samples(&enh),
            blend: StageStats::from_samples(&blend),
            evaluate: StageStats::from_samples(&eval),
            end_to_end: StageStats::from_samples(&total),
        });
    }

    Ok(BenchReport {
        width,
        height,
        samples_per_coverage: samples as u32,
        entries,
    })
}

fn count_foreground(img: &RasterImage) -> u64 {
    let mut n = 0;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.is_foreground(x, y) {
                n += 1;
            }
        }
    }
    n
}

/// Human-readable table for stdout.
pub fn format_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "throughput, {}x{} frame, {} samples per coverage (ms)\n",
        report.width, report.height, report.samples_per_coverage
    ));
    out.push_str(
        "coverage  preprocess     enhance       blend    evaluate  end-to-end (mean [min..max])\n",
    );
    for e in &report.entries {
        out.push_str(&format!(
            "{:>6.0}%  {:>9.2}  {:>10.2}  {:>10.2}  {:>10.2}  {:>7.2} [{:.2}..{:.2}]\n",
            e.coverage_percent,
            e.preprocess.mean_ms,
            e.enhance.mean_ms,
            e.blend.mean_ms,
            e.evaluate.mean_ms,
            e.end_to_end.mean_ms,
            e.end_to_end.min_ms,
            e.end_to_end.max_ms,
        ));
    }
    out
}
