//! Reference methods the enhancement is compared against.
//!
//! - [`subtraction_compensation`]: classic color correction that subtracts
//!   the background light leaking through the combiner from the rendered
//!   color. Distinguishability suffers because the display only gets dimmer.
//! - [`luminance_chroma_shift`]: a control that spends exactly the same
//!   per-pixel color difference as the optimizer but redirects the entire
//!   chromatic shift radially (pure chroma increase, no hue change).
//! - [`opposite_hue_shift`]: a control that mirrors the hue component of
//!   the optimizer's shift, producing the one other direction with equal
//!   color difference, equal luminance and equal chroma.

use rayon::prelude::*;

use crate::colorspace::{
    clamp_to_gamut, linear_to_srgb, srgb_to_linear, LinearRgb, ScaledLab, Srgb8,
};
use crate::optimizer::{apply_jnd, shift_decomposition, EnhanceParams};
use crate::preprocess::{map_frame_to_background, sample_bilinear, FovMapping, RasterImage};

/// Subtraction compensation tunables. `k_v` scales the rendered color,
/// `k_b` is the lens transparency factor applied to the background
/// (0.4 means 40% of the background light passes the combiner).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubtractionParams {
    pub k_v: f64,
    pub k_b: f64,
}

impl Default for SubtractionParams {
    fn default() -> Self {
        Self { k_v: 1.0, k_b: 0.4 }
    }
}

/// Per-channel `max(0, k_v·d - k_b·bg)` in linear light, clamped to gamut.
pub fn subtraction_compensation(d: LinearRgb, bg: LinearRgb, p: &SubtractionParams) -> LinearRgb {
    clamp_to_gamut(LinearRgb::new(
        (p.k_v * d.r - p.k_b * bg.r).max(0.0),
        (p.k_v * d.g - p.k_b * bg.g).max(0.0),
        (p.k_v * d.b - p.k_b * bg.b).max(0.0),
    ))
}

/// Enhancement by increasing luminance and chroma only: the optimizer's
/// chromatic shift is redirected radially outward along the chroma
/// direction of `d`, keeping its magnitude, so the per-pixel color
/// difference spent equals the optimizer's. The luminance part is kept
/// unchanged. For achromatic `d` no radial direction exists and the
/// optimizer's own chromatic shift is used.
pub fn luminance_chroma_shift(d: ScaledLab, b: ScaledLab, params: &EnhanceParams) -> ScaledLab {
    if params.lambda_e == 0.0 {
        return d;
    }
    let Some(shift) = shift_decomposition(d, b, params) else {
        return d;
    };
    let d_planar = d.chromatic();
    let chromatic = match d_planar.normalized(params.epsilon) {
        Some(radial) => radial * shift.dc.norm(),
        None => shift.dc,
    };
    d + chromatic + ScaledLab::new(shift.dl, 0.0, 0.0)
}

/// Enhancement along the other hue direction: identical to the optimizer
/// except the hue component of the chromatic shift is negated, leaving
/// luminance and chroma untouched. The JND floor applies as usual.
pub fn opposite_hue_shift(d: ScaledLab, b: ScaledLab, params: &EnhanceParams) -> ScaledLab {
    if params.lambda_e == 0.0 {
        return d;
    }
    let Some(shift) = shift_decomposition(d, b, params) else {
        return d;
    };
    let d_planar = d.chromatic();
    let d2 = d_planar.norm_squared();
    let mirrored = if d2 <= params.epsilon * params.epsilon {
        shift.dc
    } else {
        // Reflect about the radial direction: keeps the chroma component,
        // negates the hue component.
        let radial = d_planar * (shift.dc.dot(&d_planar) / d2);
        radial * 2.0 - shift.dc
    };
    let pre = d + mirrored + ScaledLab::new(shift.dl, 0.0, 0.0);
    let r = params.lambda_jnd_scaled;
    let p = apply_jnd(d, pre, b, r, params.epsilon);
    if p.norm_squared() > 1.0 {
        p.project_into_ball()
    } else {
        p
    }
}

/// Applies subtraction compensation over a frame: the background capture
/// (neither blurred nor attenuated; `k_b` models the combiner) is fetched
/// through the FoV mapping per foreground pixel. Background pixels pass
/// through untouched.
pub fn subtraction_frame(
    virtual_img: &RasterImage,
    bg_capture: &RasterImage,
    mapping: &FovMapping,
    params: &SubtractionParams,
) -> RasterImage {
    let w = virtual_img.width();
    let h = virtual_img.height();
    let mut out = vec![Srgb8::BLACK; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let v = (y as f64 + 0.5) / h as f64;
        for (x, px) in row.iter_mut().enumerate() {
            let src = virtual_img.get(x, y);
            if !virtual_img.is_foreground(x, y) {
                *px = src;
                continue;
            }
            let u = (x as f64 + 0.5) / w as f64;
            let (i, j) = map_frame_to_background(u, v, mapping).unwrap_or_else(|oc| oc.clamped());
            let bg = sample_bilinear(bg_capture, i, j);
            let mut enc = linear_to_srgb(subtraction_compensation(srgb_to_linear(src), bg, params));
            enc.a = src.a;
            *px = enc;
        }
    });
    RasterImage::new(w, h, out, virtual_img.has_alpha()).expect("same shape as input")
}
