//! Blend simulation and objective metrics.
//!
//! The perceived image on an optical see-through display is the per-channel
//! sum of display light and the attenuated background light. A foreground
//! pixel counts as *enhanced* when its optimized color is farther from the
//! background than the original was, by a change the eye can actually
//! notice:
//!
//! ```text
//! ΔE(bg, optimized) > ΔE(bg, original)  and  ΔE(optimized, original) ≥ λ_JND
//! ```
//!
//! evaluated in unscaled CIELAB with λ_JND ≈ 2.3. The share of enhanced
//! pixels among all foreground pixels is the headline metric.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colorspace::{
    delta_e, linear_to_lab, linear_to_srgb, srgb_to_linear, Lab, LinearRgb, Srgb8,
};
use crate::preprocess::RasterImage;

/// Unscaled CIELAB just-noticeable difference used by the evaluation.
pub const DEFAULT_JND: f64 = 2.3;

#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error(
    "images must share dimensions: {expected_width}x{expected_height} vs {got_width}x{got_height}"
)]
pub struct DimensionMismatch {
    pub expected_width: usize,
    pub expected_height: usize,
    pub got_width: usize,
    pub got_height: usize,
}

fn check_dims(a: &RasterImage, b: &RasterImage) -> Result<(), DimensionMismatch> {
    if a.same_dimensions(b) {
        Ok(())
    } else {
        Err(DimensionMismatch {
            expected_width: a.width(),
            expected_height: a.height(),
            got_width: b.width(),
            got_height: b.height(),
        })
    }
}

/// Boolean grid aligned with an image.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn values(&self) -> &[bool] {
        &self.data
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

/// Foreground mask of a virtual frame, following the image's alpha
/// convention.
pub fn foreground_mask(img: &RasterImage) -> Mask {
    Mask::from_fn(img.width(), img.height(), |x, y| img.is_foreground(x, y))
}

/// Additive blend of display light and attenuated background light,
/// clamped at the gamut ceiling.
#[inline]
pub fn blend(display: LinearRgb, bg_attenuated: LinearRgb) -> LinearRgb {
    LinearRgb::new(
        (display.r + bg_attenuated.r).min(1.0),
        (display.g + bg_attenuated.g).min(1.0),
        (display.b + bg_attenuated.b).min(1.0),
    )
}

/// Blends a display frame over the background view (already attenuated and
/// mapped into display coordinates). Non-foreground display pixels emit no
/// light, so the background shows through them unchanged.
pub fn blend_frames(
    display: &RasterImage,
    bg_view: &RasterImage,
) -> Result<RasterImage, DimensionMismatch> {
    check_dims(display, bg_view)?;
    let w = display.width();
    let mut pixels = vec![Srgb8::BLACK; w * display.height()];
    pixels.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let light = if display.is_foreground(x, y) {
                srgb_to_linear(display.get(x, y))
            } else {
                LinearRgb::BLACK
            };
            *out = linear_to_srgb(blend(light, srgb_to_linear(bg_view.get(x, y))));
        }
    });
    Ok(RasterImage::new(w, display.height(), pixels, false).expect("dimensions already validated"))
}

fn lab_of(p: Srgb8) -> Lab {
    linear_to_lab(srgb_to_linear(p))
}

/// Marks the foreground pixels whose color difference against the
/// background increased noticeably. `bg` is the blurred, attenuated
/// background resampled into the display frame.
pub fn enhanced_mask(
    bg: &RasterImage,
    original: &RasterImage,
    optimized: &RasterImage,
    jnd_unscaled: f64,
) -> Result<Mask, DimensionMismatch> {
    check_dims(original, bg)?;
    check_dims(original, optimized)?;
    Ok(Mask::from_fn(
        original.width(),
        original.height(),
        |x, y| {
            if !original.is_foreground(x, y) {
                return false;
            }
            let lb = lab_of(bg.get(x, y));
            let ld = lab_of(original.get(x, y));
            let lopt = lab_of(optimized.get(x, y));
            delta_e(lb, lopt) > delta_e(lb, ld) && delta_e(lopt, ld) >= jnd_unscaled
        },
    ))
}

/// Share of enhanced pixels among foreground pixels, in percent. An empty
/// foreground yields 0.
pub fn enhancement_percentage(mask: &Mask, foreground: &Mask) -> f64 {
    let fg = foreground.count();
    if fg == 0 {
        return 0.0;
    }
    100.0 * mask.count() as f64 / fg as f64
}

/// Paints masked pixels pure cyan over the blend image, the diagnostic view
/// of where the enhancement is perceptible.
pub fn overlay_image(blend_img: &RasterImage, mask: &Mask) -> RasterImage {
    RasterImage::from_fn(
        blend_img.width(),
        blend_img.height(),
        blend_img.has_alpha(),
        |x, y| {
            if mask.get(x, y) {
                Srgb8::CYAN
            } else {
                blend_img.get(x, y)
            }
        },
    )
}

// ---------------------------------------------------------------------------
// Metrics report
// ---------------------------------------------------------------------------

/// Distribution summary of the per-pixel ΔE between optimized and original
/// display colors, over foreground pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaEStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Wall-clock milliseconds per pipeline stage. Filled by the caller that
/// actually runs the stages; excluded from determinism comparisons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub preprocess: f64,
    pub enhance: f64,
    pub blend: f64,
    pub evaluate: f64,
}

/// Objective results for one method over one frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub foreground_pixel_count: u64,
    pub enhanced_pixel_count: u64,
    /// `100 · enhanced / foreground`; 0 when there is no foreground.
    pub enhanced_percent: f64,
    /// Mean over foreground pixels of `ΔE(bg, optimized) - ΔE(bg, original)`.
    pub mean_delta_e_gain: f64,
    /// Stats of `ΔE(optimized, original)` over foreground pixels.
    pub delta_e_change: DeltaEStats,
    /// Mean linear-light luminance of the displayed foreground pixels.
    pub mean_display_luminance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<StageTimings>,
}

/// Single pass over a frame computing both the enhanced-pixel mask and the
/// metrics report, sharing the Lab conversions between them.
pub fn evaluate_frame(
    method: &str,
    bg: &RasterImage,
    original: &RasterImage,
    optimized: &RasterImage,
    jnd_unscaled: f64,
) -> Result<(MetricsReport, Mask), DimensionMismatch> {
    check_dims(original, bg)?;
    check_dims(original, optimized)?;

    // Rows accumulate independently; the partials then fold in row order so
    // the report does not depend on the thread count.
    #[derive(Clone)]
    struct RowPartial {
        fg: u64,
        enhanced: u64,
        gain_sum: f64,
        change_sum: f64,
        change_min: f64,
        change_max: f64,
        lum_sum: f64,
    }

    let w = original.width();
    let mut mask_data = vec![false; w * original.height()];
    let partials: Vec<RowPartial> = mask_data
        .par_chunks_mut(w)
        .enumerate()
        .map(|(y, mask_row)| {
            let mut p = RowPartial {
                fg: 0,
                enhanced: 0,
                gain_sum: 0.0,
                change_sum: 0.0,
                change_min: f64::INFINITY,
                change_max: f64::NEG_INFINITY,
                lum_sum: 0.0,
            };
            for (x, mask_out) in mask_row.iter_mut().enumerate() {
                if !original.is_foreground(x, y) {
                    continue;
                }
                p.fg += 1;
                let lb = lab_of(bg.get(x, y));
                let ld = lab_of(original.get(x, y));
                let lopt = lab_of(optimized.get(x, y));
                let gain = delta_e(lb, lopt) - delta_e(lb, ld);
                let change = delta_e(lopt, ld);
                p.gain_sum += gain;
                p.change_sum += change;
                p.change_min = p.change_min.min(change);
                p.change_max = p.change_max.max(change);
                p.lum_sum += srgb_to_linear(optimized.get(x, y)).luminance();
                if gain > 0.0 && change >= jnd_unscaled {
                    *mask_out = true;
                    p.enhanced += 1;
                }
            }
            p
        })
        .collect();

    let mut fg_count = 0u64;
    let mut enhanced_count = 0u64;
    let mut gain_sum = 0.0;
    let mut change_sum = 0.0;
    let mut change_min = f64::INFINITY;
    let mut change_max = f64::NEG_INFINITY;
    let mut lum_sum = 0.0;
    for p in &partials {
        fg_count += p.fg;
        enhanced_count += p.enhanced;
        gain_sum += p.gain_sum;
        change_sum += p.change_sum;
        change_min = change_min.min(p.change_min);
        change_max = change_max.max(p.change_max);
        lum_sum += p.lum_sum;
    }

    let n = fg_count as f64;
    let report = MetricsReport {
        method: method.to_string(),
        foreground_pixel_count: fg_count,
        enhanced_pixel_count: enhanced_count,
        enhanced_percent: if fg_count == 0 {
            0.0
        } else {
            100.0 * enhanced_count as f64 / n
        },
        mean_delta_e_gain: if fg_count == 0 { 0.0 } else { gain_sum / n },
        delta_e_change: if fg_count == 0 {
            DeltaEStats::default()
        } else {
            DeltaEStats {
                mean: change_sum / n,
                min: change_min,
                max: change_max,
            }
        },
        mean_display_luminance: if fg_count == 0 { 0.0 } else { lum_sum / n },
        timing_ms: None,
    };
    let mask = Mask {
        width: original.width(),
        height: original.height(),
        data: mask_data,
    };
    Ok((report, mask))
}

/// Computes the full metrics block for one method over one frame.
pub fn frame_metrics(
    method: &str,
    bg: &RasterImage,
    original: &RasterImage,
    optimized: &RasterImage,
    jnd_unscaled: f64,
) -> Result<MetricsReport, DimensionMismatch> {
    evaluate_frame(method, bg, original, optimized, jnd_unscaled).map(|(report, _)| report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blend_identities_and_clamp() {
        let bg = LinearRgb::new(0.3, 0.2, 0.1);
        assert_eq!(blend(LinearRgb::BLACK, bg), bg);
        let d = LinearRgb::new(0.5, 0.4, 0.3);
        assert_eq!(blend(d, LinearRgb::BLACK), d);
        let clamped = blend(LinearRgb::new(0.7, 0.0, 0.0), LinearRgb::new(0.6, 0.0, 0.0));
        assert_eq!(clamped, LinearRgb::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn blend_commutes_below_clamp() {
        let a = LinearRgb::new(0.2, 0.3, 0.1);
        let b = LinearRgb::new(0.4, 0.1, 0.5);
        assert_eq!(blend(a, b), blend(b, a));
    }

    #[test]
    fn mask_identity_input_is_all_false() {
        let bg = RasterImage::filled(3, 3, Srgb8::rgb(90, 90, 90));
        let img = RasterImage::filled(3, 3, Srgb8::rgb(200, 40, 40));
        let mask = enhanced_mask(&bg, &img, &img, DEFAULT_JND).unwrap();
        assert_eq!(mask.count(), 0);
    }

    #[test]
    fn mask_two_pixel_construction() {
        // Pixel 0 moves away from the background by far more than a JND;
        // pixel 1 moves toward it. Verified through the ΔE arithmetic the
        // mask itself uses.
        let bg = RasterImage::filled(2, 1, Srgb8::rgb(100, 100, 100));
        let original = RasterImage::new(
            2,
            1,
            vec![Srgb8::rgb(150, 150, 150), Srgb8::rgb(250, 250, 250)],
            false,
        )
        .unwrap();
        let optimized = RasterImage::new(
            2,
            1,
            vec![Srgb8::rgb(250, 250, 250), Srgb8::rgb(150, 150, 150)],
            false,
        )
        .unwrap();

        let lb = lab_of(Srgb8::rgb(100, 100, 100));
        let near = lab_of(Srgb8::rgb(150, 150, 150));
        let far = lab_of(Srgb8::rgb(250, 250, 250));
        assert!(delta_e(lb, far) > delta_e(lb, near));
        assert!(delta_e(far, near) >= DEFAULT_JND);

        let mask = enhanced_mask(&bg, &original, &optimized, DEFAULT_JND).unwrap();
        assert!(mask.get(0, 0));
        assert!(!mask.get(1, 0));
    }

    #[test]
    fn mask_monotone_in_jnd() {
        let bg = RasterImage::filled(4, 4, Srgb8::rgb(120, 60, 60));
        let original = RasterImage::from_fn(4, 4, false, |x, y| {
            Srgb8::rgb(100 + (x * 30) as u8, 100, 100 + (y * 20) as u8)
        });
        let optimized = RasterImage::from_fn(4, 4, false, |x, y| {
            Srgb8::rgb(100 + (x * 30) as u8, (140 + y * 25) as u8, 60)
        });
        let loose = enhanced_mask(&bg, &original, &optimized, 1.0).unwrap();
        let tight = enhanced_mask(&bg, &original, &optimized, 8.0).unwrap();
        assert!(tight.is_subset_of(&loose));
    }

    #[test]
    fn mask_dimension_mismatch() {
        let bg = RasterImage::filled(2, 2, Srgb8::BLACK);
        let img = RasterImage::filled(3, 2, Srgb8::BLACK);
        assert!(enhanced_mask(&bg, &img, &img, DEFAULT_JND).is_err());
    }

    #[test]
    fn percentage_cases() {
        let none = Mask::filled(2, 2, false);
        assert_eq!(enhancement_percentage(&none, &none), 0.0);

        let fg = Mask::filled(2, 2, true);
        assert_eq!(enhancement_percentage(&fg, &fg), 100.0);

        let three = Mask::from_fn(2, 2, |x, y| !(x == 1 && y == 1));
        assert_eq!(enhancement_percentage(&three, &fg), 75.0);
    }

    #[test]
    fn percentage_invariant_under_translation() {
        // The same content placed one pixel up-left; mask and foreground
        // move together.
        let in_region = |x: usize, y: usize| (2..6).contains(&x) && (1..4).contains(&y);
        let content = |x: usize, y: usize| (x + y).is_multiple_of(3);
        let mask = Mask::from_fn(6, 4, |x, y| in_region(x, y) && content(x, y));
        let fg = Mask::from_fn(6, 4, in_region);
        let shifted_mask = Mask::from_fn(6, 4, |x, y| {
            in_region(x + 1, y + 1) && content(x + 1, y + 1)
        });
        let shifted_fg = Mask::from_fn(6, 4, |x, y| in_region(x + 1, y + 1));
        assert_eq!(fg.count(), shifted_fg.count());
        assert_eq!(
            enhancement_percentage(&mask, &fg),
            enhancement_percentage(&shifted_mask, &shifted_fg)
        );
    }

    #[test]
    fn overlay_cases() {
        let img = RasterImage::filled(2, 2, Srgb8::rgb(9, 9, 9));
        let empty = Mask::filled(2, 2, false);
        assert_eq!(overlay_image(&img, &empty), img);

        let full = Mask::filled(2, 2, true);
        assert!(overlay_image(&img, &full)
            .pixels()
            .iter()
            .all(|&p| p == Srgb8::CYAN));

        let checker = Mask::from_fn(2, 2, |x, y| (x + y).is_multiple_of(2));
        let out = overlay_image(&img, &checker);
        assert_eq!(out.get(0, 0), Srgb8::CYAN);
        assert_eq!(out.get(1, 0), Srgb8::rgb(9, 9, 9));
    }

    #[test]
    fn fused_evaluation_matches_standalone_mask() {
        let bg = RasterImage::filled(8, 8, Srgb8::rgb(210, 190, 40));
        let original = ostce_synth_like(8, 8, 3);
        let optimized = ostce_synth_like(8, 8, 7);
        let standalone = enhanced_mask(&bg, &original, &optimized, DEFAULT_JND).unwrap();
        let (report, fused) = evaluate_frame("x", &bg, &original, &optimized, DEFAULT_JND).unwrap();
        assert_eq!(fused, standalone);
        assert_eq!(report.enhanced_pixel_count as usize, standalone.count());
    }

    fn ostce_synth_like(w: usize, h: usize, salt: usize) -> RasterImage {
        RasterImage::from_fn(w, h, false, |x, y| {
            Srgb8::rgb(
                ((x * 37 + salt * 11) % 256) as u8,
                ((y * 53 + salt * 29) % 256) as u8,
                ((x * y + salt) % 256) as u8,
            )
        })
    }

    #[test]
    fn metrics_report_consistency() {
        let bg = RasterImage::filled(4, 2, Srgb8::rgb(128, 128, 0));
        let original = RasterImage::new(
            4,
            2,
            (0..8)
                .map(|k| if k < 4 { Srgb8::WHITE } else { Srgb8::BLACK })
                .collect(),
            false,
        )
        .unwrap();
        let optimized = RasterImage::new(
            4,
            2,
            (0..8)
                .map(|k| {
                    if k < 4 {
                        Srgb8::rgb(200, 205, 255)
                    } else {
                        Srgb8::BLACK
                    }
                })
                .collect(),
            false,
        )
        .unwrap();
        let report = frame_metrics("test", &bg, &original, &optimized, DEFAULT_JND).unwrap();
        assert_eq!(report.foreground_pixel_count, 4);
        assert_eq!(
            report.enhanced_percent,
            100.0 * report.enhanced_pixel_count as f64 / 4.0
        );
        assert!(report.delta_e_change.min <= report.delta_e_change.mean);
        assert!(report.delta_e_change.mean <= report.delta_e_change.max);
        assert!(report.timing_ms.is_none());
    }
}
