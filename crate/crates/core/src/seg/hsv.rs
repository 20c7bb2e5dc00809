//! HSV histogram features over fixed-size image patches.
//!
//! A patch is converted to HSV (hexcone model, H in [0, 360), S and V in
//! [0, 1]) and binned into 90 hue + 64 saturation + 36 value bins; the
//! three sub-histograms are L1-normalized independently and concatenated.

use core::fmt;

use crate::geometry::PixelPoint;
use crate::img::RgbImage;

pub const HUE_BINS: usize = 90;
pub const SAT_BINS: usize = 64;
pub const VAL_BINS: usize = 36;
pub const FEATURE_DIM: usize = HUE_BINS + SAT_BINS + VAL_BINS;

/// Default patch side length in pixels.
pub const DEFAULT_PATCH_SIZE: u32 = 40;

/// Concatenated, per-channel-normalized HSV histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvHistogramFeature(pub [f64; FEATURE_DIM]);

impl HsvHistogramFeature {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegError {
    /// Patch clamping produced zero pixels.
    EmptyPatch,
    /// A class id in `0..num_classes` has no training samples.
    DegenerateData { class: u8 },
    /// Fewer than two distinct labels in the training set.
    TooFewClasses,
}

impl fmt::Display for SegError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyPatch => write!(f, "patch has no pixels after clamping"),
            Self::DegenerateData { class } => write!(f, "class {class} has no training samples"),
            Self::TooFewClasses => write!(f, "training requires at least two distinct labels"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SegError {}

/// Hexcone RGB -> HSV: hue in degrees [0, 360), saturation and value in
/// [0, 1]. Hue of achromatic pixels is 0.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> (f64, f64, f64) {
    let r = rgb[0] as f64 / 255.0;
    let g = rgb[1] as f64 / 255.0;
    let b = rgb[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let value = max;
    let saturation = if max > 0.0 { chroma / max } else { 0.0 };
    let hue = if chroma == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / chroma + 6.0) % 6.0)
    } else if max == g {
        60.0 * ((b - r) / chroma + 2.0)
    } else {
        60.0 * ((r - g) / chroma + 4.0)
    };
    (hue % 360.0, saturation, value)
}

#[inline]
fn bins(h: f64, s: f64, v: f64) -> (usize, usize, usize) {
    let hb = ((h / 4.0) as usize).min(HUE_BINS - 1);
    let sb = ((s * SAT_BINS as f64) as usize).min(SAT_BINS - 1);
    let vb = ((v * VAL_BINS as f64) as usize).min(VAL_BINS - 1);
    (hb, sb, vb)
}

/// Extracts the HSV histogram feature of the `size`-by-`size` patch
/// centered at `center`, clamped to the image bounds.
pub fn extract_patch_feature(
    image: &RgbImage,
    center: PixelPoint,
    size: u32,
) -> Result<HsvHistogramFeature, SegError> {
    let half = (size / 2) as i64;
    let cu = center.u as i64;
    let cv = center.v as i64;
    let u0 = (cu - half).max(0);
    let v0 = (cv - half).max(0);
    let u1 = (cu - half + size as i64).min(image.width() as i64);
    let v1 = (cv - half + size as i64).min(image.height() as i64);
    if u0 >= u1 || v0 >= v1 {
        return Err(SegError::EmptyPatch);
    }
    let mut feature = [0.0f64; FEATURE_DIM];
    let count = ((u1 - u0) * (v1 - v0)) as f64;
    for v in v0..v1 {
        for u in u0..u1 {
            let (h, s, val) = rgb_to_hsv(image.get(u as u32, v as u32));
            let (hb, sb, vb) = bins(h, s, val);
            feature[hb] += 1.0;
            feature[HUE_BINS + sb] += 1.0;
            feature[HUE_BINS + SAT_BINS + vb] += 1.0;
        }
    }
    for x in feature.iter_mut() {
        *x /= count;
    }
    Ok(HsvHistogramFeature(feature))
}
