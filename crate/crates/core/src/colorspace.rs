//! Color representations and the conversions between them.
//!
//! Colors move through four spaces, each with a distinct role:
//!
//! - [`Srgb8`] — 8-bit gamma-encoded display color, the storage format of
//!   image files and the physical display.
//! - [`LinearRgb`] — linear-light intensities in nominal `[0, 1]`. All
//!   physically meaningful arithmetic (blurring, blending, attenuation)
//!   happens here.
//! - [`Lab`] — CIE 1976 L\*a\*b\* under D65, the space used for perceptual
//!   color difference (ΔE) in the evaluation metrics.
//! - [`ScaledLab`] — Lab with every axis affinely mapped to `[-1, 1]`
//!   (`x = L/50 - 1`, `y = a/128`, `z = b/128`). The optimizer searches
//!   inside the inscribed unit ball of this cube.
//!
//! The sRGB transfer function is implemented with a decode lookup table and
//! a quantization boundary table for encoding, so the 8-bit round trip is
//! exact by construction and no `powf` runs per pixel.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::LazyLock;

use crate::fastmath;

/// 8-bit sRGB color with alpha. Alpha defaults to 255 (opaque) for images
/// without an alpha channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Srgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Srgb8 {
    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b, a: 255 }
    }

    pub const fn rgba(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }

    pub const BLACK: Self = Self::rgb(0, 0, 0);
    pub const WHITE: Self = Self::rgb(255, 255, 255);
    /// Diagnostic overlay color for enhanced pixels.
    pub const CYAN: Self = Self::rgb(0, 255, 255);
}

/// Linear-light RGB. Nominally `[0, 1]`; values above 1 occur transiently
/// while summing display and background light, before the gamut clamp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl LinearRgb {
    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub const BLACK: Self = Self::new(0.0, 0.0, 0.0);

    /// Relative luminance (the Y row of the RGB→XYZ matrix).
    pub fn luminance(&self) -> f64 {
        SRGB_TO_XYZ[1][0] * self.r + SRGB_TO_XYZ[1][1] * self.g + SRGB_TO_XYZ[1][2] * self.b
    }
}

/// CIE 1976 L\*a\*b\* color, D65 white point, 2° observer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }
}

/// A point (or displacement) in the scaled LAB space: each Lab axis mapped
/// affinely onto `[-1, 1]`, with `x` carrying L\*, `y` carrying a\* and `z`
/// carrying b\*. Colors the optimizer works on live inside the closed unit
/// ball of this space; the same type doubles as the shift vectors between
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledLab {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ScaledLab {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in this direction, or `None` if the length is at or
    /// below `epsilon`.
    pub fn normalized(&self, epsilon: f64) -> Option<Self> {
        let n = self.norm();
        if n <= epsilon {
            None
        } else {
            Some(*self * (1.0 / n))
        }
    }

    /// Projection onto the chromatic (a\*b\*) plane: the same point with the
    /// luminance component zeroed.
    pub fn chromatic(&self) -> Self {
        Self::new(0.0, self.y, self.z)
    }

    /// Radial distance from the achromatic axis.
    pub fn chroma(&self) -> f64 {
        (self.y * self.y + self.z * self.z).sqrt()
    }

    /// Radially projects a point onto the closed unit ball. Points already
    /// inside are returned unchanged.
    pub fn project_into_ball(&self) -> Self {
        let n2 = self.norm_squared();
        if n2 > 1.0 {
            *self * (1.0 / n2.sqrt())
        } else {
            *self
        }
    }
}

impl Add for ScaledLab {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for ScaledLab {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for ScaledLab {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for ScaledLab {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

// ---------------------------------------------------------------------------
// sRGB transfer function
// ---------------------------------------------------------------------------

/// Continuous sRGB electro-optical transfer function (gamma decode).
pub fn srgb_decode_channel(encoded: f64) -> f64 {
    if encoded <= 0.04045 {
        encoded / 12.92
    } else {
        ((encoded + 0.055) / 1.055).powf(2.4)
    }
}

/// Continuous inverse transfer function (gamma encode). Input is clamped to
/// `[0, 1]`.
pub fn srgb_encode_channel(linear: f64) -> f64 {
    let c = linear.clamp(0.0, 1.0);
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

static DECODE_LUT: LazyLock<[f64; 256]> = LazyLock::new(|| {
    let mut lut = [0.0; 256];
    for (i, slot) in lut.iter_mut().enumerate() {
        *slot = srgb_decode_channel(i as f64 / 255.0);
    }
    lut
});

// Quantization boundaries: BOUNDARIES[k] is the linear value that encodes to
// exactly halfway between code k and code k+1. Quantizing by counting
// boundaries below the input is identical to round-to-nearest in the encoded
// domain, and makes the 8-bit round trip exact, since decode is strictly
// monotone.
static ENCODE_BOUNDARIES: LazyLock<[f64; 255]> = LazyLock::new(|| {
    let mut b = [0.0; 255];
    for (k, slot) in b.iter_mut().enumerate() {
        *slot = srgb_decode_channel((k as f64 + 0.5) / 255.0);
    }
    b
});

// Starting guess for the quantizer, indexed by `linear * 4096`. The encode
// curve is steep near zero, so a full binary search per channel would burn
// time on the hot path; a coarse bucket plus a short monotone scan lands on
// the exact code in a couple of steps.
const GUESS_BUCKETS: usize = 4096;
static ENCODE_GUESS: LazyLock<[u8; GUESS_BUCKETS]> = LazyLock::new(|| {
    let boundaries = &*ENCODE_BOUNDARIES;
    let mut guess = [0u8; GUESS_BUCKETS];
    for (i, slot) in guess.iter_mut().enumerate() {
        let c = i as f64 / GUESS_BUCKETS as f64;
        *slot = boundaries.partition_point(|&b| b <= c) as u8;
    }
    guess
});

/// Decodes one 8-bit channel to linear light via lookup table.
#[inline]
pub fn srgb_channel_to_linear(v: u8) -> f64 {
    DECODE_LUT[v as usize]
}

/// Encodes one linear channel to the nearest 8-bit sRGB code. Values outside
/// `[0, 1]` clamp to the range ends.
#[inline]
pub fn linear_channel_to_srgb(c: f64) -> u8 {
    if c.is_nan() || c <= 0.0 {
        return 0;
    }
    if c >= 1.0 {
        return 255;
    }
    let boundaries = &*ENCODE_BOUNDARIES;
    let mut k = ENCODE_GUESS[(c * GUESS_BUCKETS as f64) as usize % GUESS_BUCKETS] as usize;
    while k < 255 && boundaries[k] <= c {
        k += 1;
    }
    while k > 0 && boundaries[k - 1] > c {
        k -= 1;
    }
    k as u8
}

/// Decodes a stored display color into linear light. Alpha is dropped.
#[inline]
pub fn srgb_to_linear(c: Srgb8) -> LinearRgb {
    LinearRgb::new(
        srgb_channel_to_linear(c.r),
        srgb_channel_to_linear(c.g),
        srgb_channel_to_linear(c.b),
    )
}

/// Encodes linear light back to an opaque 8-bit display color, clamping to
/// gamut first.
#[inline]
pub fn linear_to_srgb(c: LinearRgb) -> Srgb8 {
    Srgb8::rgb(
        linear_channel_to_srgb(c.r),
        linear_channel_to_srgb(c.g),
        linear_channel_to_srgb(c.b),
    )
}

/// Channel-wise clamp to the displayable `[0, 1]` range.
pub fn clamp_to_gamut(c: LinearRgb) -> LinearRgb {
    LinearRgb::new(
        c.r.clamp(0.0, 1.0),
        c.g.clamp(0.0, 1.0),
        c.b.clamp(0.0, 1.0),
    )
}

// ---------------------------------------------------------------------------
// XYZ bridge and CIELAB
// ---------------------------------------------------------------------------

// sRGB primaries, D65 white. High-precision values derived from the
// chromaticity coordinates; the inverse is the exact matrix inverse, so the
// round trip is limited only by floating-point rounding.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.41239079926595934, 0.357584339383878, 0.1804807884018343],
    [0.21263900587151027, 0.715168678767756, 0.07219231536073371],
    [0.01933081871559182, 0.11919477979462598, 0.9505321522496607],
];

const XYZ_TO_SRGB: [[f64; 3]; 3] = [
    [3.2409699419045226, -1.537383177570094, -0.4986107602930034],
    [-0.9692436362808796, 1.8759675015077202, 0.04155505740717559],
    [
        0.05563007969699366,
        -0.20397695888897652,
        1.0569715142428786,
    ],
];

// White point as the matrix row sums, so that linear (1,1,1) lands exactly
// on the reference white and converts to a* = b* = 0.
const WHITE_X: f64 = SRGB_TO_XYZ[0][0] + SRGB_TO_XYZ[0][1] + SRGB_TO_XYZ[0][2];
const WHITE_Y: f64 = SRGB_TO_XYZ[1][0] + SRGB_TO_XYZ[1][1] + SRGB_TO_XYZ[1][2];
const WHITE_Z: f64 = SRGB_TO_XYZ[2][0] + SRGB_TO_XYZ[2][1] + SRGB_TO_XYZ[2][2];

// Lab transfer function constants: delta = 6/29.
const LAB_DELTA: f64 = 6.0 / 29.0;
const LAB_DELTA2: f64 = LAB_DELTA * LAB_DELTA;
const LAB_DELTA3: f64 = LAB_DELTA * LAB_DELTA * LAB_DELTA;

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA3 {
        fastmath::cbrt(t)
    } else {
        t / (3.0 * LAB_DELTA2) + 4.0 / 29.0
    }
}

#[inline]
fn lab_f_inv(t: f64) -> f64 {
    if t > LAB_DELTA {
        t * t * t
    } else {
        3.0 * LAB_DELTA2 * (t - 4.0 / 29.0)
    }
}

/// Converts linear-light RGB to CIELAB.
#[inline]
pub fn linear_to_lab(c: LinearRgb) -> Lab {
    let x = SRGB_TO_XYZ[0][0] * c.r + SRGB_TO_XYZ[0][1] * c.g + SRGB_TO_XYZ[0][2] * c.b;
    let y = SRGB_TO_XYZ[1][0] * c.r + SRGB_TO_XYZ[1][1] * c.g + SRGB_TO_XYZ[1][2] * c.b;
    let z = SRGB_TO_XYZ[2][0] * c.r + SRGB_TO_XYZ[2][1] * c.g + SRGB_TO_XYZ[2][2] * c.b;
    let fx = lab_f(x / WHITE_X);
    let fy = lab_f(y / WHITE_Y);
    let fz = lab_f(z / WHITE_Z);
    Lab::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Converts CIELAB back to linear-light RGB, clamping the result to the
/// displayable gamut. Lab covers far more than any display can reproduce,
/// so out-of-gamut inputs saturate channel-wise.
#[inline]
pub fn lab_to_linear(c: Lab) -> LinearRgb {
    let fy = (c.l + 16.0) / 116.0;
    let fx = fy + c.a / 500.0;
    let fz = fy - c.b / 200.0;
    let x = lab_f_inv(fx) * WHITE_X;
    let y = lab_f_inv(fy) * WHITE_Y;
    let z = lab_f_inv(fz) * WHITE_Z;
    let r = XYZ_TO_SRGB[0][0] * x + XYZ_TO_SRGB[0][1] * y + XYZ_TO_SRGB[0][2] * z;
    let g = XYZ_TO_SRGB[1][0] * x + XYZ_TO_SRGB[1][1] * y + XYZ_TO_SRGB[1][2] * z;
    let b = XYZ_TO_SRGB[2][0] * x + XYZ_TO_SRGB[2][1] * y + XYZ_TO_SRGB[2][2] * z;
    clamp_to_gamut(LinearRgb::new(r, g, b))
}

// ---------------------------------------------------------------------------
// Scaled LAB
// ---------------------------------------------------------------------------

/// Chromatic axis scale: a\* and b\* divide by this to land in `[-1, 1]`.
pub const CHROMATIC_AXIS_SCALE: f64 = 128.0;

/// Maps Lab onto the `[-1, 1]` cube: `x = L/50 - 1`, `y = a/128`,
/// `z = b/128`.
#[inline]
pub fn lab_to_scaled(c: Lab) -> ScaledLab {
    ScaledLab::new(
        c.l / 50.0 - 1.0,
        c.a / CHROMATIC_AXIS_SCALE,
        c.b / CHROMATIC_AXIS_SCALE,
    )
}

/// Exact inverse of [`lab_to_scaled`].
#[inline]
pub fn scaled_to_lab(c: ScaledLab) -> Lab {
    Lab::new(
        (c.x + 1.0) * 50.0,
        c.y * CHROMATIC_AXIS_SCALE,
        c.z * CHROMATIC_AXIS_SCALE,
    )
}

/// CIE 1976 color difference: the Euclidean distance in Lab.
#[inline]
pub fn delta_e(x: Lab, y: Lab) -> f64 {
    let dl = x.l - y.l;
    let da = x.a - y.a;
    let db = x.b - y.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// Chroma of a scaled-LAB point: distance from the achromatic axis.
#[inline]
pub fn chroma(c: ScaledLab) -> f64 {
    c.chroma()
}

/// Full decode of a stored display color into the optimizer's space.
#[inline]
pub fn srgb_to_scaled(c: Srgb8) -> ScaledLab {
    lab_to_scaled(linear_to_lab(srgb_to_linear(c)))
}

/// Full encode from the optimizer's space back to a display color.
#[inline]
pub fn scaled_to_srgb(c: ScaledLab) -> Srgb8 {
    linear_to_srgb(lab_to_linear(scaled_to_lab(c)))
}
