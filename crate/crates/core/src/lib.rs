//! Color contrast enhancement for optical see-through head-mounted displays.
//!
//! Optical combiners add rendered pixels on top of the light coming from the
//! real scene, so virtual content with low color contrast against its
//! background is hard to distinguish. This crate implements a per-pixel
//! enhancement that shifts each displayed color toward the complementary
//! color of the background it sits in front of, working in a scaled CIELAB
//! space under constraints that preserve chroma, luminance and overall
//! consistency with the original color. It also ships the simulation and
//! measurement pieces needed to evaluate the effect offline:
//!
//! - [`colorspace`] — sRGB / linear / CIELAB / scaled-LAB conversions, ΔE
//!   and chroma primitives
//! - [`preprocess`] — Gaussian blur of the captured background, FoV
//!   calibration mapping, luminance attenuation
//! - [`optimizer`] — the constrained per-pixel search for the optimal
//!   displayed color
//! - [`baselines`] — subtraction compensation and two controlled hue/chroma
//!   variants used for comparison
//! - [`evaluate`] — additive blending simulation, enhanced-pixel metrics,
//!   diagnostic overlays
//! - [`synth`] — deterministic synthetic images for tests and benchmarks
//!
//! All operations are pure functions over value types; frame-level entry
//! points parallelize over rows internally and produce identical output
//! regardless of thread count.

pub mod baselines;
pub mod colorspace;
pub mod evaluate;
mod fastmath;
pub mod optimizer;
pub mod preprocess;
#[cfg(feature = "reference")]
pub mod reference;
pub mod synth;

pub use colorspace::{Lab, LinearRgb, ScaledLab, Srgb8};
pub use evaluate::{Mask, MetricsReport};
pub use optimizer::EnhanceParams;
pub use preprocess::{BlurParams, FovMapping, LinearImage, RasterImage};
