//! Raster buffers shared across the stack: class labels, depth, RGB.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Number of semantic classes in the scene palette.
pub const NUM_CLASSES: u8 = 17;

/// Reserved label for pixels with no assigned class.
pub const UNKNOWN_CLASS: u8 = u8::MAX;

/// Fixed semantic class ids of the scene palette.
pub mod class_id {
    /// Walls, floor outside the carpet, anything beyond the scene.
    pub const BACKGROUND: u8 = 0;
    /// The textured carpet: the designated fly zone and the ground-plane
    /// reference for scale recovery.
    pub const CARPET: u8 = 1;
    /// The striped box surrounding the landing pad.
    pub const HELIPAD_BOX: u8 = 2;
    /// The "H" sign on top of the landing pad.
    pub const HELIPAD_H: u8 = 3;
    /// First obstacle class; obstacle bodies and roofs occupy 4..17.
    pub const FIRST_OBSTACLE: u8 = 4;
}

/// Per-pixel semantic class ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassImage {
    width: u32,
    height: u32,
    labels: Vec<u8>,
}

impl ClassImage {
    pub fn filled(width: u32, height: u32, label: u8) -> Self {
        Self {
            width,
            height,
            labels: vec![label; (width * height) as usize],
        }
    }

    pub fn from_labels(width: u32, height: u32, labels: Vec<u8>) -> Result<Self, ImageError> {
        if labels.len() != (width as usize) * (height as usize) {
            return Err(ImageError::SizeMismatch);
        }
        if let Some(&bad) = labels
            .iter()
            .find(|&&l| l >= NUM_CLASSES && l != UNKNOWN_CLASS)
        {
            return Err(ImageError::InvalidLabel(bad));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
    pub fn labels_mut(&mut self) -> &mut [u8] {
        &mut self.labels
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> u8 {
        self.labels[(v * self.width + u) as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, label: u8) {
        self.labels[(v * self.width + u) as usize] = label;
    }

    /// Binary mask of one class.
    pub fn mask_of(&self, label: u8) -> Vec<bool> {
        self.labels.iter().map(|&l| l == label).collect()
    }

    pub fn count_of(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Per-pixel depth values; relative (dimensionless) or metric (meters)
/// depending on where in the pipeline the map sits.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl DepthMap {
    pub fn filled(width: u32, height: u32, value: f64) -> Self {
        Self {
            width,
            height,
            values: vec![value; (width * height) as usize],
        }
    }

    pub fn from_values(width: u32, height: u32, values: Vec<f64>) -> Result<Self, ImageError> {
        if values.len() != (width as usize) * (height as usize) {
            return Err(ImageError::SizeMismatch);
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Checks the relative-depth invariants: all values finite and
    /// non-negative, at least one positive.
    pub fn validate_relative(&self) -> Result<(), ImageError> {
        let mut any_positive = false;
        for &v in &self.values {
            if !v.is_finite() || v < 0.0 {
                return Err(ImageError::InvalidDepth);
            }
            any_positive |= v > 0.0;
        }
        if !any_positive {
            return Err(ImageError::InvalidDepth);
        }
        Ok(())
    }

    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> f64 {
        self.values[(v * self.width + u) as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, value: f64) {
        self.values[(v * self.width + u) as usize] = value;
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Flat-color RGB frame (palette rendering).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; (width * height) as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        if pixels.len() != (width as usize) * (height as usize) {
            return Err(ImageError::SizeMismatch);
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> [u8; 3] {
        self.pixels[(v * self.width + u) as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, color: [u8; 3]) {
        self.pixels[(v * self.width + u) as usize] = color;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageError {
    SizeMismatch,
    InvalidLabel(u8),
    InvalidDepth,
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SizeMismatch => write!(f, "buffer length does not match dimensions"),
            Self::InvalidLabel(l) => write!(f, "label {l} outside the class palette"),
            Self::InvalidDepth => write!(f, "depth values must be finite, non-negative, not all zero"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ImageError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_image_rejects_bad_labels() {
        assert!(ClassImage::from_labels(2, 2, vec![0, 1, 16, UNKNOWN_CLASS]).is_ok());
        assert_eq!(
            ClassImage::from_labels(2, 2, vec![0, 1, 17, 0]),
            Err(ImageError::InvalidLabel(17))
        );
        assert_eq!(
            ClassImage::from_labels(2, 2, vec![0; 3]),
            Err(ImageError::SizeMismatch)
        );
    }

    #[test]
    fn relative_depth_invariants() {
        let good = DepthMap::from_values(2, 1, vec![0.0, 0.5]).unwrap();
        assert!(good.validate_relative().is_ok());
        let zeroes = DepthMap::filled(2, 1, 0.0);
        assert!(zeroes.validate_relative().is_err());
        let neg = DepthMap::from_values(2, 1, vec![-0.1, 0.5]).unwrap();
        assert!(neg.validate_relative().is_err());
    }

    #[test]
    fn indexing_roundtrip() {
        let mut img = ClassImage::filled(4, 3, 0);
        img.set(2, 1, 7);
        assert_eq!(img.get(2, 1), 7);
        assert_eq!(img.count_of(7), 1);
        assert_eq!(img.mask_of(7).iter().filter(|&&b| b).count(), 1);
    }
}
