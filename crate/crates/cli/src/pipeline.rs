//! End-to-end frame pipeline: preprocess → enhance → blend → evaluate.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use ostce_core::baselines::{
    luminance_chroma_shift, opposite_hue_shift, subtraction_frame, SubtractionParams,
};
use ostce_core::evaluate::{
    blend_frames, evaluate_frame, overlay_image, MetricsReport, StageTimings,
};
use ostce_core::optimizer::{enhance_frame, enhance_frame_with};
use ostce_core::preprocess::{
    attenuate_linear, gaussian_blur_linear, resample_linear, LinearImage, RasterImage,
};
use ostce_core::synth;

use crate::config::{Method, RunConfig};
use crate::error::CliError;
use crate::io::{load_png, save_png};

/// Background rasters derived once per frame and shared by all methods.
pub struct PreparedBackground {
    /// Blurred and attenuated capture, in capture coordinates: what the
    /// optimizer samples through the FoV mapping.
    pub optimizer_input: RasterImage,
    /// Raw capture, for subtraction compensation (its `k_b` models the
    /// combiner itself).
    pub capture: RasterImage,
    /// Attenuated, unblurred background resampled to the display frame:
    /// what the eye sees through the combiner behind each display pixel.
    pub view_frame: RasterImage,
    /// Blurred, attenuated background resampled to the display frame: the
    /// reference the evaluation measures ΔE against.
    pub eval_frame: RasterImage,
    pub prep_ms: f64,
}

pub fn prepare_background(
    bg: &RasterImage,
    cfg: &RunConfig,
    frame_w: usize,
    frame_h: usize,
) -> PreparedBackground {
    let start = Instant::now();
    // Stay in linear light across the chain and quantize once per output.
    let capture_lin = LinearImage::from_raster(bg);
    let blurred_attenuated = attenuate_linear(
        &gaussian_blur_linear(&capture_lin, &cfg.blur),
        cfg.attenuation,
    );
    let optimizer_input = blurred_attenuated.to_raster(None);
    let view_frame = resample_linear(
        &attenuate_linear(&capture_lin, cfg.attenuation),
        &cfg.fov,
        frame_w,
        frame_h,
    )
    .to_raster(None);
    let eval_frame =
        resample_linear(&blurred_attenuated, &cfg.fov, frame_w, frame_h).to_raster(None);
    PreparedBackground {
        optimizer_input,
        capture: bg.clone(),
        view_frame,
        eval_frame,
        prep_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Everything produced for one (frame, method) pair.
pub struct FrameArtifacts {
    pub enhanced: RasterImage,
    pub blend: RasterImage,
    pub overlay: RasterImage,
    pub report: MetricsReport,
}

/// Runs one method over a prepared frame and measures it.
pub fn run_method(
    method: Method,
    virtual_img: &RasterImage,
    bg: &PreparedBackground,
    cfg: &RunConfig,
) -> Result<FrameArtifacts, CliError> {
    let params = cfg.enhance_params();
    let t_enhance = Instant::now();
    let enhanced = match method {
        Method::Ours => enhance_frame(virtual_img, &bg.optimizer_input, &cfg.fov, &params),
        Method::LumChroma => enhance_frame_with(
            virtual_img,
            &bg.optimizer_input,
            &cfg.fov,
            &params,
            luminance_chroma_shift,
        ),
        Method::OppositeHue => enhance_frame_with(
            virtual_img,
            &bg.optimizer_input,
            &cfg.fov,
            &params,
            opposite_hue_shift,
        ),
        Method::Subtract => subtraction_frame(
            virtual_img,
            &bg.capture,
            &cfg.fov,
            &SubtractionParams {
                k_v: 1.0,
                k_b: 1.0 - cfg.attenuation,
            },
        ),
        Method::None => virtual_img.clone(),
    };
    let enhance_ms = t_enhance.elapsed().as_secs_f64() * 1e3;

    let t_blend = Instant::now();
    let blend = blend_frames(&enhanced, &bg.view_frame)
        .map_err(|e| CliError::Io(format!("blend failed: {e}")))?;
    let blend_ms = t_blend.elapsed().as_secs_f64() * 1e3;

    let t_eval = Instant::now();
    let (mut report, mask) = evaluate_frame(
        method.name(),
        &bg.eval_frame,
        virtual_img,
        &enhanced,
        cfg.jnd,
    )
    .map_err(|e| CliError::Io(format!("evaluation failed: {e}")))?;
    let overlay = overlay_image(&blend, &mask);
    let evaluate_ms = t_eval.elapsed().as_secs_f64() * 1e3;

    report.timing_ms = Some(StageTimings {
        preprocess: bg.prep_ms,
        enhance: enhance_ms,
        blend: blend_ms,
        evaluate: evaluate_ms,
    });

    Ok(FrameArtifacts {
        enhanced,
        blend,
        overlay,
        report,
    })
}

/// Lists the background frames of a run: a single file, or every `.png`
/// inside a directory in lexicographic order.
pub fn background_frames(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if path.is_dir() {
        let mut frames: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::Io(format!("cannot read directory {}: {e}", path.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .map(|e| e.eq_ignore_ascii_case("png"))
                    .unwrap_or(false)
            })
            .collect();
        frames.sort();
        if frames.is_empty() {
            return Err(CliError::Io(format!(
                "directory {} contains no .png frames",
                path.display()
            )));
        }
        Ok(frames)
    } else if path.is_file() {
        Ok(vec![path.to_path_buf()])
    } else {
        Err(CliError::Io(format!(
            "input path {} does not exist",
            path.display()
        )))
    }
}

fn require_inputs(cfg: &RunConfig) -> Result<(PathBuf, PathBuf, PathBuf), CliError> {
    let virt = cfg
        .virtual_path
        .clone()
        .ok_or_else(|| CliError::Usage("--virtual is required".into()))?;
    let bg = cfg
        .background_path
        .clone()
        .ok_or_else(|| CliError::Usage("--background is required".into()))?;
    let out = cfg
        .out_dir
        .clone()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    Ok((virt, bg, out))
}

fn write_report_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
    std::fs::write(path, json + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn frame_stem(path: &Path, multi: bool) -> String {
    if multi {
        format!(
            "{}_",
            path.file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_default()
        )
    } else {
        String::new()
    }
}

/// Single-method run: writes the enhanced frame, the simulated blend, the
/// optional overlay, and the metrics JSON.
pub fn run_enhance(cfg: &RunConfig) -> Result<(), CliError> {
    let (virt_path, bg_path, out_dir) = require_inputs(cfg)?;
    let virtual_img = load_png(&virt_path)?;
    let frames = background_frames(&bg_path)?;
    let multi = frames.len() > 1;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut reports = Vec::new();
    for frame_path in &frames {
        let bg = load_png(frame_path)?;
        let prepared = prepare_background(&bg, cfg, virtual_img.width(), virtual_img.height());
        let artifacts = run_method(cfg.method, &virtual_img, &prepared, cfg)?;

        let stem = frame_stem(frame_path, multi);
        save_png(
            &out_dir.join(format!("{stem}enhanced.png")),
            &artifacts.enhanced,
        )?;
        save_png(&out_dir.join(format!("{stem}blend.png")), &artifacts.blend)?;
        if cfg.emit_overlay {
            save_png(
                &out_dir.join(format!("{stem}overlay.png")),
                &artifacts.overlay,
            )?;
        }
        let mut report = artifacts.report;
        report.method = cfg.method.name().to_string();
        reports.push((stem, report));
    }

    let report_path = cfg
        .report_path
        .clone()
        .unwrap_or_else(|| out_dir.join("metrics.json"));
    if multi {
        let entries: Vec<FrameReport> = reports
            .into_iter()
            .map(|(stem, report)| FrameReport {
                frame: stem.trim_end_matches('_').to_string(),
                report,
            })
            .collect();
        write_report_json(&report_path, &entries)?;
    } else {
        write_report_json(&report_path, &reports[0].1)?;
    }
    Ok(())
}

/// One frame's report inside a multi-frame run.
#[derive(Serialize, Deserialize)]
pub struct FrameReport {
    pub frame: String,
    #[serde(flatten)]
    pub report: MetricsReport,
}

/// Multi-method comparison over the same inputs: per-method metrics, the
/// enhanced-percentage ranking, and a side-by-side image grid (one row per
/// method: enhanced | blend | overlay).
#[derive(Serialize, Deserialize)]
pub struct CompareReport {
    pub methods: Vec<MetricsReport>,
    /// Method names sorted by enhanced-pixel percentage, best first.
    pub ranking: Vec<String>,
}

pub fn run_compare(cfg: &RunConfig, methods: &[Method]) -> Result<(), CliError> {
    if methods.len() < 2 {
        return Err(CliError::Usage(
            "--compare needs at least two methods".into(),
        ));
    }
    let (virt_path, bg_path, out_dir) = require_inputs(cfg)?;
    let virtual_img = load_png(&virt_path)?;
    let frames = background_frames(&bg_path)?;
    let multi = frames.len() > 1;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut all_reports = Vec::new();
    for frame_path in &frames {
        let bg = load_png(frame_path)?;
        let prepared = prepare_background(&bg, cfg, virtual_img.width(), virtual_img.height());
        let stem = frame_stem(frame_path, multi);

        let mut rows = Vec::new();
        let mut reports = Vec::new();
        for &method in methods {
            let artifacts = run_method(method, &virtual_img, &prepared, cfg)?;
            rows.push([
                artifacts.enhanced.clone(),
                artifacts.blend.clone(),
                artifacts.overlay.clone(),
            ]);
            reports.push(artifacts.report);
        }

        let grid = compose_grid(&rows);
        save_png(&out_dir.join(format!("{stem}compare.png")), &grid)?;

        let mut ranking: Vec<(String, f64)> = reports
            .iter()
            .map(|r| (r.method.clone(), r.enhanced_percent))
            .collect();
        ranking.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

        all_reports.push((
            stem,
            CompareReport {
                methods: reports,
                ranking: ranking.into_iter().map(|(name, _)| name).collect(),
            },
        ));
    }

    let report_path = cfg
        .report_path
        .clone()
        .unwrap_or_else(|| out_dir.join("compare.json"));
    if multi {
        let entries: Vec<serde_json::Value> = all_reports
            .into_iter()
            .map(|(stem, rep)| {
                serde_json::json!({
                    "frame": stem.trim_end_matches('_'),
                    "methods": rep.methods,
                    "ranking": rep.ranking,
                })
            })
            .collect();
        write_report_json(&report_path, &entries)?;
    } else {
        write_report_json(&report_path, &all_reports[0].1)?;
    }
    Ok(())
}

/// Stitches rows of equally sized images into one grid with thin separators.
fn compose_grid(rows: &[[RasterImage; 3]]) -> RasterImage {
    use ostce_core::colorspace::Srgb8;
    let cell_w = rows[0][0].width();
    let cell_h = rows[0][0].height();
    let gap = 2usize;
    let width = cell_w * 3 + gap * 2;
    let height = cell_h * rows.len() + gap * (rows.len() - 1);
    RasterImage::from_fn(width, height, false, |x, y| {
        let col = (x / (cell_w + gap)).min(2);
        let row = (y / (cell_h + gap)).min(rows.len() - 1);
        let cx = x.checked_sub(col * (cell_w + gap));
        let cy = y.checked_sub(row * (cell_h + gap));
        match (cx, cy) {
            (Some(cx), Some(cy)) if cx < cell_w && cy < cell_h => {
                let p = rows[row][col].get(cx, cy);
                Srgb8::rgb(p.r, p.g, p.b)
            }
            _ => Srgb8::rgb(24, 24, 24),
        }
    })
}

/// Convenience used by tests and the bench: run every stage in memory for
/// one frame and method, without touching the filesystem.
pub fn run_in_memory(
    virtual_img: &RasterImage,
    bg: &RasterImage,
    cfg: &RunConfig,
    method: Method,
) -> Result<FrameArtifacts, CliError> {
    let prepared = prepare_background(bg, cfg, virtual_img.width(), virtual_img.height());
    run_method(method, virtual_img, &prepared, cfg)
}

/// Deterministic demo inputs used by documentation examples and smoke
/// tests.
pub fn demo_inputs(width: usize, height: usize) -> (RasterImage, RasterImage) {
    (
        synth::hud_panel(width, height),
        synth::hue_sweep(width, height),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            fov: ostce_core::preprocess::FovMapping::IDENTITY,
            ..RunConfig::default()
        }
    }

    #[test]
    fn method_none_blends_original_content() {
        let (virt, bg) = demo_inputs(48, 32);
        let cfg = small_cfg();
        let art = run_in_memory(&virt, &bg, &cfg, Method::None).unwrap();
        assert_eq!(art.enhanced, virt);
        assert_eq!(art.report.enhanced_pixel_count, 0);
        assert_eq!(art.report.enhanced_percent, 0.0);
    }

    #[test]
    fn ours_enhances_some_pixels_on_saturated_background() {
        let (virt, _) = demo_inputs(48, 32);
        let bg = RasterImage::filled(48, 32, ostce_core::colorspace::Srgb8::rgb(228, 212, 72));
        let cfg = small_cfg();
        let art = run_in_memory(&virt, &bg, &cfg, Method::Ours).unwrap();
        assert!(
            art.report.enhanced_percent > 10.0,
            "{}",
            art.report.enhanced_percent
        );
        assert!(art.report.timing_ms.is_some());
    }

    #[test]
    fn subtract_dims_the_display() {
        let (virt, bg) = demo_inputs(48, 32);
        let cfg = small_cfg();
        let original = run_in_memory(&virt, &bg, &cfg, Method::None).unwrap();
        let subtracted = run_in_memory(&virt, &bg, &cfg, Method::Subtract).unwrap();
        assert!(subtracted.report.mean_display_luminance < original.report.mean_display_luminance);
    }

    #[test]
    fn compare_grid_dimensions() {
        let a = RasterImage::filled(10, 6, ostce_core::colorspace::Srgb8::BLACK);
        let rows = vec![[a.clone(), a.clone(), a.clone()], [a.clone(), a.clone(), a]];
        let grid = compose_grid(&rows);
        assert_eq!(grid.width(), 10 * 3 + 4);
        assert_eq!(grid.height(), 6 * 2 + 2);
    }
}
