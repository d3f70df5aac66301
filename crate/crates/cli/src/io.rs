//! PNG decode and encode for [`RasterImage`].

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Rgb, Rgba};
use ostce_core::colorspace::Srgb8;
use ostce_core::preprocess::RasterImage;

use crate::error::CliError;

pub fn load_png(path: &Path) -> Result<RasterImage, CliError> {
    let img = image::open(path)
        .map_err(|e| CliError::Io(format!("cannot read image {}: {e}", path.display())))?;
    let has_alpha = img.color().has_alpha();
    let rgba = img.to_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let pixels = rgba
        .pixels()
        .map(|p| Srgb8::rgba(p[0], p[1], p[2], p[3]))
        .collect();
    RasterImage::new(w, h, pixels, has_alpha)
        .map_err(|e| CliError::Io(format!("invalid image {}: {e}", path.display())))
}

pub fn save_png(path: &Path, img: &RasterImage) -> Result<(), CliError> {
    let w = img.width() as u32;
    let h = img.height() as u32;
    let dynamic = if img.has_alpha() {
        let buf: ImageBuffer<Rgba<u8>, Vec<u8>> = ImageBuffer::from_fn(w, h, |x, y| {
            let p = img.get(x as usize, y as usize);
            Rgba([p.r, p.g, p.b, p.a])
        });
        DynamicImage::ImageRgba8(buf)
    } else {
        let buf: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::from_fn(w, h, |x, y| {
            let p = img.get(x as usize, y as usize);
            Rgb([p.r, p.g, p.b])
        });
        DynamicImage::ImageRgb8(buf)
    };
    dynamic
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CliError::Io(format!("cannot write image {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip_preserves_pixels_and_alpha() {
        let dir = std::env::temp_dir().join(format!("ostce-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        let rgb = ostce_core::synth::noise(13, 9, 42);
        let path = dir.join("rgb.png");
        save_png(&path, &rgb).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(back, rgb);

        let rgba = ostce_core::synth::hud_panel(24, 16);
        let path = dir.join("rgba.png");
        save_png(&path, &rgba).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(back, rgba);

        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn load_missing_file_is_io_error() {
        let err = load_png(Path::new("/nonexistent/nope.png")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
