//! Deterministic synthetic images for tests, fixtures and benchmarks.
//!
//! Everything here is seeded and platform-independent so that generated
//! fixtures and benchmark frames are reproducible byte-for-byte.

use crate::colorspace::Srgb8;
use crate::preprocess::RasterImage;

/// xorshift64* generator; deterministic across platforms, good enough for
/// test patterns.
#[derive(Clone, Debug)]
pub struct Xorshift(u64);

impl Xorshift {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn next_u8(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Horizontal gradient from `left` to `right`, interpolated per channel in
/// the encoded domain.
pub fn horizontal_gradient(width: usize, height: usize, left: Srgb8, right: Srgb8) -> RasterImage {
    RasterImage::from_fn(width, height, false, |x, _| {
        let t = if width == 1 {
            0.0
        } else {
            x as f64 / (width - 1) as f64
        };
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Srgb8::rgb(
            mix(left.r, right.r),
            mix(left.g, right.g),
            mix(left.b, right.b),
        )
    })
}

/// Vertical gradient from `top` to `bottom`.
pub fn vertical_gradient(width: usize, height: usize, top: Srgb8, bottom: Srgb8) -> RasterImage {
    RasterImage::from_fn(width, height, false, |_, y| {
        let t = if height == 1 {
            0.0
        } else {
            y as f64 / (height - 1) as f64
        };
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Srgb8::rgb(
            mix(top.r, bottom.r),
            mix(top.g, bottom.g),
            mix(top.b, bottom.b),
        )
    })
}

/// Two-color checkerboard with square cells.
pub fn checkerboard(width: usize, height: usize, cell: usize, a: Srgb8, b: Srgb8) -> RasterImage {
    let cell = cell.max(1);
    RasterImage::from_fn(width, height, false, |x, y| {
        if (x / cell + y / cell).is_multiple_of(2) {
            a
        } else {
            b
        }
    })
}

/// Per-pixel random colors from the given seed.
pub fn noise(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = Xorshift::new(seed);
    RasterImage::from_fn(width, height, false, |_, _| {
        Srgb8::rgb(rng.next_u8(), rng.next_u8(), rng.next_u8())
    })
}

/// Fully saturated hue sweep across x with lightness falling toward the
/// bottom.
pub fn hue_sweep(width: usize, height: usize) -> RasterImage {
    RasterImage::from_fn(width, height, false, |x, y| {
        let h = x as f64 / width as f64 * 360.0;
        let v = 1.0 - 0.6 * (y as f64 / height.max(1) as f64);
        hsv(h, 1.0, v)
    })
}

fn hsv(h: f64, s: f64, v: f64) -> Srgb8 {
    let c = v * s;
    let hp = (h / 60.0) % 6.0;
    let x = c * (1.0 - ((hp % 2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    Srgb8::rgb(q(r), q(g), q(b))
}

/// Virtual content mimicking a HUD: transparent background, a shaded title
/// block, rows of text-like dashes, a photo-like textured block and a strip
/// of color swatches with per-pixel shading. Has an alpha channel; only the
/// drawn content is foreground. The shading matters: real content has few
/// perfectly uniform regions, and fixture statistics should not be
/// dominated by whole blocks of identical pixels.
pub fn hud_panel(width: usize, height: usize) -> RasterImage {
    let mut img = RasterImage::from_fn(width, height, true, |_, _| Srgb8::rgba(0, 0, 0, 0));
    let margin = width / 12;

    // Title block, slightly shaded toward the bottom.
    let title_h = height / 8;
    for y in margin..(margin + title_h).min(height) {
        let t = (y - margin) as f64 / title_h.max(1) as f64;
        let v = (255.0 - 28.0 * t).round() as u8;
        for x in margin..(width - margin).min(width) {
            img.set(x, y, Srgb8::rgb(v, v, v));
        }
    }

    // Text lines: short near-white dashes with gaps and varying lengths.
    // The mild per-pixel brightness ripple stands in for the antialiasing
    // of real glyph rendering.
    let line_h = (height / 24).max(1);
    let mut y = margin + title_h + line_h * 2;
    let mut k = 0usize;
    while y + line_h < height * 11 / 20 {
        let mut x = margin;
        while x + 3 < width - margin {
            let dash = 3 + (k * 7 + x) % 9;
            let end = (x + dash).min(width - margin);
            for yy in y..(y + line_h).min(height) {
                for xx in x..end {
                    let v = 255 - ((xx * 5 + yy * 3 + k * 17) % 18) as u8;
                    img.set(xx, yy, Srgb8::rgb(v, v, v));
                }
            }
            x = end + 2 + (k + x) % 4;
        }
        y += line_h * 2;
        k += 1;
    }

    // Photo-like block: smooth hue and lightness variation, kept inside
    // typical display-content range rather than at the gamut edge.
    let py0 = height * 11 / 20;
    let py1 = height * 7 / 10;
    for y in py0..py1.min(height) {
        for x in margin..(width - margin).min(width) {
            let fx = x as f64 / width as f64;
            let fy = (y - py0) as f64 / (py1 - py0).max(1) as f64;
            let h = 200.0 + 120.0 * (fx * 6.0).sin() * (0.5 + 0.5 * fy);
            let v = 0.40 + 0.33 * (fx * 9.0 + fy * 3.0).cos().abs();
            img.set(x, y, hsv(h.rem_euclid(360.0), 0.42, v));
        }
    }

    // Swatch strip: UI accent colors with a diagonal shading ramp inside
    // each swatch.
    let swatches = [
        Srgb8::rgb(216, 72, 62),
        Srgb8::rgb(72, 172, 98),
        Srgb8::rgb(84, 118, 208),
        Srgb8::rgb(224, 192, 64),
        Srgb8::rgb(188, 98, 188),
        Srgb8::rgb(124, 124, 124),
        Srgb8::rgb(232, 142, 56),
        Srgb8::rgb(62, 186, 186),
    ];
    let sw = (width - 2 * margin) / swatches.len();
    let sy = height * 3 / 4;
    let sh = height / 6;
    for (i, &c) in swatches.iter().enumerate() {
        let x0 = margin + i * sw;
        for y in sy..(sy + sh).min(height) {
            for x in x0..(x0 + sw.saturating_sub(2)).min(width) {
                let t = ((x - x0) + (y - sy)) as f64 / (sw + sh).max(1) as f64;
                let scale = 0.62 + 0.38 * t;
                let shade = |v: u8| ((v as f64 * scale).round().clamp(1.0, 255.0)) as u8;
                img.set(x, y, Srgb8::rgb(shade(c.r), shade(c.g), shade(c.b)));
            }
        }
    }
    img
}

/// Virtual content without an alpha channel: geometric shapes on black
/// (black reads as transparent on an additive display).
pub fn shapes_panel(width: usize, height: usize) -> RasterImage {
    let mut img = RasterImage::filled(width, height, Srgb8::BLACK);
    let cx = width as f64 / 2.0;
    let cy = height as f64 / 2.0;
    let r_outer = width.min(height) as f64 * 0.32;
    for y in 0..height {
        for x in 0..width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let d = (dx * dx + dy * dy).sqrt();
            if d < r_outer * 0.45 {
                img.set(x, y, Srgb8::rgb(245, 245, 245));
            } else if d < r_outer {
                let h = dy.atan2(dx).to_degrees().rem_euclid(360.0);
                img.set(x, y, hsv(h, 0.85, 0.9));
            }
        }
    }
    // Corner tabs.
    let tab_w = width / 6;
    let tab_h = height / 10;
    fill_rect(&mut img, 2, 2, tab_w, tab_h, Srgb8::rgb(255, 230, 120));
    fill_rect(
        &mut img,
        width - tab_w - 2,
        height - tab_h - 2,
        tab_w,
        tab_h,
        Srgb8::rgb(90, 160, 255),
    );
    img
}

fn fill_rect(img: &mut RasterImage, x0: usize, y0: usize, w: usize, h: usize, c: Srgb8) {
    for y in y0..(y0 + h).min(img.height()) {
        for x in x0..(x0 + w).min(img.width()) {
            img.set(x, y, c);
        }
    }
}

/// Frame for throughput benchmarks: exactly `coverage_percent` of the
/// pixels (rounded to the nearest pixel) are non-black foreground, filled
/// row-major from the top with varied colors so the per-pixel work is
/// representative.
pub fn coverage_frame(width: usize, height: usize, coverage_percent: f64) -> RasterImage {
    let total = width * height;
    let fg = ((coverage_percent / 100.0) * total as f64).round() as usize;
    let mut rng = Xorshift::new(0xC0FFEE);
    let mut remaining = fg;
    RasterImage::from_fn(width, height, false, |x, _| {
        if remaining == 0 {
            return Srgb8::BLACK;
        }
        remaining -= 1;
        let h = (x % 360) as f64;
        let mut c = hsv(h, 0.7, 0.55 + 0.45 * rng.next_f64());
        // Keep foreground pixels strictly non-black.
        if c.r == 0 && c.g == 0 && c.b == 0 {
            c = Srgb8::rgb(1, 1, 1);
        }
        c
    })
}

/// Mild vignette and grain over an existing image, like a real surface
/// under uneven light.
pub fn with_grain(img: &RasterImage, grain: f64) -> RasterImage {
    RasterImage::from_fn(img.width(), img.height(), img.has_alpha(), |x, y| {
        let fx = x as f64 / img.width().max(1) as f64 - 0.5;
        let fy = y as f64 / img.height().max(1) as f64 - 0.5;
        let vignette = 1.0 - 0.35 * (fx * fx + fy * fy);
        let ripple = 1.0 + grain * (x as f64 * 0.73).sin() * (y as f64 * 0.41).cos();
        let p = img.get(x, y);
        let shade = |v: u8| ((v as f64 * vignette * ripple).round().clamp(0.0, 255.0)) as u8;
        Srgb8::rgba(shade(p.r), shade(p.g), shade(p.b), p.a)
    })
}

/// Flat wall with a mild per-pixel grain and vignette, like a real painted
/// surface under uneven light.
pub fn textured_wall(width: usize, height: usize, base: Srgb8, grain: f64) -> RasterImage {
    with_grain(&RasterImage::filled(width, height, base), grain)
}

/// The bundled evaluation backgrounds: a dozen scenes spanning saturated
/// walls, gradients, and textured clutter. Names are stable; the PNG
/// fixtures in the repository are generated from these.
pub fn fixture_backgrounds(width: usize, height: usize) -> Vec<(&'static str, RasterImage)> {
    vec![
        (
            "yellow_wall",
            textured_wall(width, height, Srgb8::rgb(228, 212, 72), 0.03),
        ),
        (
            "blue_wall",
            textured_wall(width, height, Srgb8::rgb(58, 92, 216), 0.03),
        ),
        (
            "green_hedge",
            textured_wall(width, height, Srgb8::rgb(66, 158, 70), 0.08),
        ),
        (
            "red_brick",
            textured_wall(width, height, Srgb8::rgb(178, 62, 48), 0.06),
        ),
        (
            "light_gray",
            textured_wall(width, height, Srgb8::rgb(207, 204, 199), 0.04),
        ),
        (
            "dark_gray",
            textured_wall(width, height, Srgb8::rgb(58, 56, 54), 0.06),
        ),
        (
            "sky_gradient",
            with_grain(
                &vertical_gradient(
                    width,
                    height,
                    Srgb8::rgb(110, 170, 235),
                    Srgb8::rgb(225, 238, 248),
                ),
                0.03,
            ),
        ),
        (
            "sunset_gradient",
            with_grain(
                &vertical_gradient(
                    width,
                    height,
                    Srgb8::rgb(244, 150, 60),
                    Srgb8::rgb(120, 60, 130),
                ),
                0.04,
            ),
        ),
        (
            "checker",
            checkerboard(
                width,
                height,
                width.max(8) / 8,
                Srgb8::rgb(40, 40, 40),
                Srgb8::rgb(215, 215, 215),
            ),
        ),
        ("clutter_noise", noise(width, height, 0x5EED_0001)),
        ("hue_sweep", hue_sweep(width, height)),
        (
            "warm_interior",
            with_grain(
                &horizontal_gradient(
                    width,
                    height,
                    Srgb8::rgb(190, 140, 90),
                    Srgb8::rgb(240, 220, 180),
                ),
                0.05,
            ),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(noise(16, 16, 7), noise(16, 16, 7));
        assert_eq!(hud_panel(64, 48), hud_panel(64, 48));
        assert_eq!(coverage_frame(32, 32, 40.0), coverage_frame(32, 32, 40.0));
    }

    #[test]
    fn coverage_frame_pixel_counts() {
        for pct in [0.0, 10.0, 50.0, 100.0] {
            let img = coverage_frame(40, 30, pct);
            let fg = (0..30)
                .flat_map(|y| (0..40).map(move |x| (x, y)))
                .filter(|&(x, y)| img.is_foreground(x, y))
                .count();
            let want = (pct / 100.0 * 1200.0).round() as usize;
            assert_eq!(fg, want, "coverage {pct}%");
        }
    }

    #[test]
    fn hud_panel_has_transparent_background_and_content() {
        let img = hud_panel(96, 64);
        assert!(img.has_alpha());
        assert!(!img.is_foreground(0, 0));
        let fg = (0..64)
            .flat_map(|y| (0..96).map(move |x| (x, y)))
            .filter(|&(x, y)| img.is_foreground(x, y))
            .count();
        assert!(fg > 500, "expected substantial content, got {fg} px");
    }

    #[test]
    fn fixture_backgrounds_count_and_shape() {
        let bgs = fixture_backgrounds(96, 64);
        assert!(bgs.len() >= 10);
        for (name, img) in &bgs {
            assert_eq!((img.width(), img.height()), (96, 64), "{name}");
        }
    }
}
