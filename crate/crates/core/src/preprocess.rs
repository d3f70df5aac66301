//! Background preparation: Gaussian blur, FoV calibration and luminance
//! attenuation.
//!
//! The captured background video has a wider field of view than the display
//! and is seen through a translucent combiner. Before a background color can
//! be paired with a display pixel it gets blurred (the enhancement reacts to
//! the low-frequency surround, not to per-pixel detail), attenuated (the
//! combiner dims the world), and resampled through the calibration mapping
//! into display-frame coordinates.

use rayon::prelude::*;
use thiserror::Error;

use crate::colorspace::{linear_to_srgb, srgb_channel_to_linear, srgb_to_linear, LinearRgb, Srgb8};

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1")]
    EmptyDimensions,
    #[error("{width}x{height} image needs {expected} pixels, got {got}")]
    ShapeMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
}

/// Row-major grid of 8-bit sRGB pixels, the unit of pipeline I/O.
///
/// `has_alpha` records whether the source file carried an alpha channel;
/// it decides the foreground convention (see [`RasterImage::is_foreground`]).
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Srgb8>,
    has_alpha: bool,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        pixels: Vec<Srgb8>,
        has_alpha: bool,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions);
        }
        if pixels.len() != width * height {
            return Err(ImageError::ShapeMismatch {
                width,
                height,
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
            has_alpha,
        })
    }

    /// Solid-color opaque image.
    pub fn filled(width: usize, height: usize, color: Srgb8) -> Self {
        Self::new(width, height, vec![color; width * height], false).expect("non-empty")
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        has_alpha: bool,
        mut f: impl FnMut(usize, usize) -> Srgb8,
    ) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels, has_alpha).expect("non-empty")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn has_alpha(&self) -> bool {
        self.has_alpha
    }

    pub fn pixels(&self) -> &[Srgb8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Srgb8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Srgb8) {
        self.pixels[y * self.width + x] = c;
    }

    /// Foreground convention: with an alpha channel, any pixel with alpha
    /// above zero is foreground. Without one, any non-black pixel is —
    /// additive displays render black as fully transparent.
    #[inline]
    pub fn is_foreground(&self, x: usize, y: usize) -> bool {
        let p = self.get(x, y);
        if self.has_alpha {
            p.a > 0
        } else {
            p.r != 0 || p.g != 0 || p.b != 0
        }
    }

    pub fn same_dimensions(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Linear-light image plane. Blur and attenuation run here so that the
/// averaging happens on physical light rather than gamma-encoded bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearImage {
    width: usize,
    height: usize,
    pixels: Vec<LinearRgb>,
}

impl LinearImage {
    pub fn from_raster(img: &RasterImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            pixels: img.pixels.par_iter().map(|&p| srgb_to_linear(p)).collect(),
        }
    }

    /// Quantizes back to 8-bit, copying alpha from `alpha_source` when given.
    pub fn to_raster(&self, alpha_source: Option<&RasterImage>) -> RasterImage {
        let pixels = self
            .pixels
            .par_iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut p = linear_to_srgb(c);
                if let Some(src) = alpha_source {
                    p.a = src.pixels[i].a;
                }
                p
            })
            .collect();
        RasterImage {
            width: self.width,
            height: self.height,
            pixels,
            has_alpha: alpha_source.map(|s| s.has_alpha).unwrap_or(false),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> LinearRgb {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[LinearRgb] {
        &self.pixels
    }

    /// Channel-wise mean over all pixels.
    pub fn mean(&self) -> LinearRgb {
        let mut r = 0.0;
        let mut g = 0.0;
        let mut b = 0.0;
        for p in &self.pixels {
            r += p.r;
            g += p.g;
            b += p.b;
        }
        let n = self.pixels.len() as f64;
        LinearRgb::new(r / n, g / n, b / n)
    }

    /// Bilinear sample at normalized texture coordinates, texel centers at
    /// `(x + 0.5) / width`. Coordinates clamp to the image edges.
    pub fn sample_bilinear(&self, i: f64, j: f64) -> LinearRgb {
        let x = (i.clamp(0.0, 1.0) * self.width as f64 - 0.5).max(0.0);
        let y = (j.clamp(0.0, 1.0) * self.height as f64 - 0.5).max(0.0);
        let x0 = (x as usize).min(self.width - 1);
        let y0 = (y as usize).min(self.height - 1);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let p00 = self.get(x0, y0);
        let p10 = self.get(x1, y0);
        let p01 = self.get(x0, y1);
        let p11 = self.get(x1, y1);
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        LinearRgb::new(
            lerp(lerp(p00.r, p10.r, fx), lerp(p01.r, p11.r, fx), fy),
            lerp(lerp(p00.g, p10.g, fx), lerp(p01.g, p11.g, fx), fy),
            lerp(lerp(p00.b, p10.b, fx), lerp(p01.b, p11.b, fx), fy),
        )
    }
}

// ---------------------------------------------------------------------------
// Gaussian blur
// ---------------------------------------------------------------------------

/// Blur tunables. The kernel must be odd so it has a center tap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlurParams {
    pub kernel_size: usize,
    pub sigma: f64,
}

impl BlurParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.kernel_size == 0 || self.kernel_size.is_multiple_of(2) {
            return Err(format!(
                "blur kernel size must be odd and positive, got {}",
                self.kernel_size
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(format!(
                "blur sigma must be finite and positive, got {}",
                self.sigma
            ));
        }
        Ok(())
    }
}

impl Default for BlurParams {
    fn default() -> Self {
        Self {
            kernel_size: 3,
            sigma: 1.5,
        }
    }
}

/// Normalized 1D Gaussian taps. The 2D kernel is the outer product, so the
/// `1/(2πσ²)` prefactor cancels in normalization.
pub fn gaussian_kernel(kernel_size: usize, sigma: f64) -> Vec<f64> {
    let radius = (kernel_size / 2) as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable Gaussian blur in linear light with clamp-to-edge borders.
pub fn gaussian_blur_linear(img: &LinearImage, params: &BlurParams) -> LinearImage {
    params.validate().expect("invalid blur params");
    if params.kernel_size == 1 {
        return img.clone();
    }
    let taps = gaussian_kernel(params.kernel_size, params.sigma);
    let radius = (params.kernel_size / 2) as isize;
    let (w, h) = (img.width, img.height);

    // Horizontal pass. Interior pixels skip the border clamp entirely.
    let mut horizontal = vec![LinearRgb::BLACK; w * h];
    horizontal
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(y, row)| {
            let src = &img.pixels[y * w..(y + 1) * w];
            let radius_u = radius as usize;
            let interior_end = w.saturating_sub(radius_u);
            let mut x = 0;
            while x < w {
                let clamped = x < radius_u || x >= interior_end;
                let mut r = 0.0;
                let mut g = 0.0;
                let mut b = 0.0;
                if clamped {
                    for (k, &tap) in taps.iter().enumerate() {
                        let sx =
                            (x as isize + k as isize - radius).clamp(0, w as isize - 1) as usize;
                        let p = src[sx];
                        r += tap * p.r;
                        g += tap * p.g;
                        b += tap * p.b;
                    }
                } else {
                    let base = x - radius_u;
                    for (k, &tap) in taps.iter().enumerate() {
                        let p = src[base + k];
                        r += tap * p.r;
                        g += tap * p.g;
                        b += tap * p.b;
                    }
                }
                row[x] = LinearRgb::new(r, g, b);
                x += 1;
            }
        });

    // Vertical pass.
    let mut pixels = vec![LinearRgb::BLACK; w * h];
    pixels.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let radius_u = radius as usize;
        let clamped = y < radius_u || y + radius_u >= h;
        if clamped {
            for (x, out) in row.iter_mut().enumerate() {
                let mut r = 0.0;
                let mut g = 0.0;
                let mut b = 0.0;
                for (k, &tap) in taps.iter().enumerate() {
                    let sy = (y as isize + k as isize - radius).clamp(0, h as isize - 1) as usize;
                    let p = horizontal[sy * w + x];
                    r += tap * p.r;
                    g += tap * p.g;
                    b += tap * p.b;
                }
                *out = LinearRgb::new(r, g, b);
            }
        } else {
            let base = y - radius_u;
            for (x, out) in row.iter_mut().enumerate() {
                let mut r = 0.0;
                let mut g = 0.0;
                let mut b = 0.0;
                for (k, &tap) in taps.iter().enumerate() {
                    let p = horizontal[(base + k) * w + x];
                    r += tap * p.r;
                    g += tap * p.g;
                    b += tap * p.b;
                }
                *out = LinearRgb::new(r, g, b);
            }
        }
    });

    LinearImage {
        width: w,
        height: h,
        pixels,
    }
}

/// [`gaussian_blur_linear`] with 8-bit input and output. Alpha passes
/// through untouched.
pub fn gaussian_blur(img: &RasterImage, params: &BlurParams) -> RasterImage {
    if params.kernel_size == 1 {
        params.validate().expect("invalid blur params");
        return img.clone();
    }
    gaussian_blur_linear(&LinearImage::from_raster(img), params).to_raster(Some(img))
}

// ---------------------------------------------------------------------------
// FoV calibration
// ---------------------------------------------------------------------------

/// Affine texture-coordinate calibration between the display frame `(u, v)`
/// and the background capture `(i, j)`: `u = s_u * i + b_u`,
/// `v = s_v * j + b_v`. The capture FoV is assumed to exceed the display's,
/// so `s < 1` picks out a centered sub-rectangle of the capture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FovMapping {
    pub s_u: f64,
    pub s_v: f64,
    pub b_u: f64,
    pub b_v: f64,
}

impl FovMapping {
    pub const IDENTITY: Self = Self {
        s_u: 1.0,
        s_v: 1.0,
        b_u: 0.0,
        b_v: 0.0,
    };

    pub const fn new(s_u: f64, s_v: f64, b_u: f64, b_v: f64) -> Self {
        Self { s_u, s_v, b_u, b_v }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.s_u > 0.0 && self.s_v > 0.0) {
            return Err(format!(
                "fov scale factors must be positive, got ({}, {})",
                self.s_u, self.s_v
            ));
        }
        for v in [self.s_u, self.s_v, self.b_u, self.b_v] {
            if !v.is_finite() {
                return Err("fov mapping values must be finite".into());
            }
        }
        // The mapped rectangle must overlap the capture at all.
        if self.b_u > 1.0
            || self.b_u + self.s_u < 0.0
            || self.b_v > 1.0
            || self.b_v + self.s_v < 0.0
        {
            return Err("fov mapping does not intersect the unit square".into());
        }
        Ok(())
    }
}

impl Default for FovMapping {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// A frame coordinate that maps outside the captured background. Carries
/// the raw mapped coordinates so callers can decide how to fall back;
/// [`OutOfCoverage::clamped`] snaps to the nearest covered sample.
#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error("frame point maps outside the background capture at ({i:.4}, {j:.4})")]
pub struct OutOfCoverage {
    pub i: f64,
    pub j: f64,
}

impl OutOfCoverage {
    pub fn clamped(&self) -> (f64, f64) {
        (self.i.clamp(0.0, 1.0), self.j.clamp(0.0, 1.0))
    }
}

/// Inverts the calibration: given a display-frame coordinate, returns the
/// background-capture coordinate to sample.
#[inline]
pub fn map_frame_to_background(
    u: f64,
    v: f64,
    m: &FovMapping,
) -> Result<(f64, f64), OutOfCoverage> {
    let i = (u - m.b_u) / m.s_u;
    let j = (v - m.b_v) / m.s_v;
    if (0.0..=1.0).contains(&i) && (0.0..=1.0).contains(&j) {
        Ok((i, j))
    } else {
        Err(OutOfCoverage { i, j })
    }
}

/// Bilinear sample of an 8-bit image in linear light. See
/// [`LinearImage::sample_bilinear`] for the coordinate convention. Decodes
/// only the four touched texels.
pub fn sample_bilinear(img: &RasterImage, i: f64, j: f64) -> LinearRgb {
    let x = (i.clamp(0.0, 1.0) * img.width as f64 - 0.5).max(0.0);
    let y = (j.clamp(0.0, 1.0) * img.height as f64 - 0.5).max(0.0);
    let x0 = (x as usize).min(img.width - 1);
    let y0 = (y as usize).min(img.height - 1);
    let x1 = (x0 + 1).min(img.width - 1);
    let y1 = (y0 + 1).min(img.height - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let decode = |p: Srgb8| {
        LinearRgb::new(
            srgb_channel_to_linear(p.r),
            srgb_channel_to_linear(p.g),
            srgb_channel_to_linear(p.b),
        )
    };
    let p00 = decode(img.get(x0, y0));
    let p10 = decode(img.get(x1, y0));
    let p01 = decode(img.get(x0, y1));
    let p11 = decode(img.get(x1, y1));
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    LinearRgb::new(
        lerp(lerp(p00.r, p10.r, fx), lerp(p01.r, p11.r, fx), fy),
        lerp(lerp(p00.g, p10.g, fx), lerp(p01.g, p11.g, fx), fy),
        lerp(lerp(p00.b, p10.b, fx), lerp(p01.b, p11.b, fx), fy),
    )
}

/// Dims an image by multiplying linear-light channels by
/// `1 - attenuation`, simulating the combiner's transmission loss.
/// `attenuation` of 0.6 keeps 40% of the light.
pub fn attenuate_linear(img: &LinearImage, attenuation: f64) -> LinearImage {
    assert!(
        (0.0..=1.0).contains(&attenuation),
        "attenuation must be within [0, 1], got {attenuation}"
    );
    let keep = 1.0 - attenuation;
    LinearImage {
        width: img.width,
        height: img.height,
        pixels: img
            .pixels
            .par_iter()
            .map(|p| LinearRgb::new(p.r * keep, p.g * keep, p.b * keep))
            .collect(),
    }
}

/// [`attenuate_linear`] with 8-bit input and output.
pub fn attenuate(img: &RasterImage, attenuation: f64) -> RasterImage {
    if attenuation == 0.0 {
        return img.clone();
    }
    attenuate_linear(&LinearImage::from_raster(img), attenuation).to_raster(Some(img))
}

/// Resamples the background capture into display-frame coordinates: one
/// bilinear fetch through the calibration mapping per display pixel.
/// Out-of-coverage pixels clamp to the nearest edge sample.
pub fn resample_to_frame(
    bg: &RasterImage,
    mapping: &FovMapping,
    width: usize,
    height: usize,
) -> RasterImage {
    let mut pixels = vec![Srgb8::BLACK; width * height];
    pixels
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| {
            let v = (y as f64 + 0.5) / height as f64;
            for (x, out) in row.iter_mut().enumerate() {
                let u = (x as f64 + 0.5) / width as f64;
                let (i, j) =
                    map_frame_to_background(u, v, mapping).unwrap_or_else(|oc| oc.clamped());
                *out = linear_to_srgb(sample_bilinear(bg, i, j));
            }
        });
    RasterImage {
        width,
        height,
        pixels,
        has_alpha: false,
    }
}

/// [`resample_to_frame`] over linear-light planes, for pipelines that stay
/// in linear space between stages.
pub fn resample_linear(
    src: &LinearImage,
    mapping: &FovMapping,
    width: usize,
    height: usize,
) -> LinearImage {
    let mut pixels = vec![LinearRgb::BLACK; width * height];
    pixels
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, row)| {
            let v = (y as f64 + 0.5) / height as f64;
            for (x, out) in row.iter_mut().enumerate() {
                let u = (x as f64 + 0.5) / width as f64;
                let (i, j) =
                    map_frame_to_background(u, v, mapping).unwrap_or_else(|oc| oc.clamped());
                *out = src.sample_bilinear(i, j);
            }
        });
    LinearImage {
        width,
        height,
        pixels,
    }
}
