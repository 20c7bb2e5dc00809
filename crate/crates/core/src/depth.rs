//! Relative-to-metric depth conversion.
//!
//! The per-frame adaptive scale factor divides geometric ground distances
//! (from [`crate::geometry`]) by the predicted relative depth at randomly
//! sampled carpet pixels and takes the median ratio. The two global
//! calibration methods — plain ratio and least-squares scale/shift — are
//! provided for comparison against measured ground-truth pairs.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::geometry::{distance_to_ground, CameraIntrinsics, DronePose, PixelPoint};
use crate::img::{ClassImage, DepthMap};

/// Relative depths at or below this floor are treated as degenerate and
/// excluded from ratio computations.
pub const EPSILON_REL: f64 = 1e-6;

/// Pixels closer than this to a non-ground pixel (or the image border) are
/// excluded from ground sampling.
pub const DEFAULT_SAMPLE_MARGIN: u32 = 10;

/// Minimum number of usable ground samples before estimation gives up.
pub const MIN_GROUND_SAMPLES: usize = 10;

/// How many replacement candidates may be drawn, as a multiple of the
/// requested sample count, when rays miss the ground.
const RESAMPLE_FACTOR: usize = 3;

/// One accepted ground sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSample {
    pub pixel: PixelPoint,
    /// Geometric camera-to-ground distance, meters.
    pub distance_m: f64,
    /// Predicted relative depth at the pixel.
    pub relative: f64,
}

/// Result of a scale estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimate {
    /// Meters per relative-depth unit.
    pub scale: f64,
    /// Additive shift in meters; present only for the least-squares method.
    pub shift: Option<f64>,
    pub n_samples: usize,
    pub samples: Vec<GroundSample>,
}

impl ScaleEstimate {
    pub fn from_scale(scale: f64) -> Self {
        Self {
            scale,
            shift: None,
            n_samples: 0,
            samples: Vec::new(),
        }
    }
}

/// Rectangular pixel region, half-open: `u0 <= u < u1`, `v0 <= v < v1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionOfInterest {
    pub u0: u32,
    pub v0: u32,
    pub u1: u32,
    pub v1: u32,
}

impl RegionOfInterest {
    pub fn new(u0: u32, v0: u32, u1: u32, v1: u32, width: u32, height: u32) -> Result<Self, DepthError> {
        if u0 >= u1 || v0 >= v1 || u1 > width || v1 > height {
            return Err(DepthError::InvalidRoi);
        }
        Ok(Self { u0, v0, u1, v1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthError {
    /// Too few eligible ground pixels (or too few surviving samples).
    InsufficientGround { eligible: usize, requested: usize },
    /// More than half of the sampled pixels carried a near-zero relative depth.
    DegenerateDepth,
    /// The predicted values have zero variance; the line fit is underdetermined.
    DegenerateFit,
    /// A predicted value was zero or negative where a ratio was required.
    DivisionDomain,
    EmptyRoi,
    InvalidRoi,
}

impl fmt::Display for DepthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InsufficientGround { eligible, requested } => write!(
                f,
                "only {eligible} eligible ground pixels for {requested} requested samples"
            ),
            Self::DegenerateDepth => write!(f, "relative depth is near zero on most sampled pixels"),
            Self::DegenerateFit => write!(f, "predicted values have zero variance"),
            Self::DivisionDomain => write!(f, "ratio method requires positive predicted values"),
            Self::EmptyRoi => write!(f, "region of interest contains no pixels"),
            Self::InvalidRoi => write!(f, "region of interest is empty or out of bounds"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DepthError {}

/// Median with the midpoint convention for even counts. `values` must be
/// non-empty and free of NaN.
pub fn median(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("no NaN in median input"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Pixels of `ground` class whose full `margin`-Chebyshev neighborhood is
/// also ground (image borders count as non-ground). Row-major order.
fn eligible_ground_pixels(mask: &ClassImage, ground: u8, margin: u32) -> Vec<(u32, u32)> {
    let (w, h) = (mask.width(), mask.height());
    if margin == 0 {
        let mut out = Vec::new();
        for v in 0..h {
            for u in 0..w {
                if mask.get(u, v) == ground {
                    out.push((u, v));
                }
            }
        }
        return out;
    }
    // Integral image of the binary mask for O(1) window sums.
    let (wi, hi) = (w as usize, h as usize);
    let mut integral = alloc::vec![0u32; (wi + 1) * (hi + 1)];
    for v in 0..hi {
        for u in 0..wi {
            let m = (mask.get(u as u32, v as u32) == ground) as u32;
            integral[(v + 1) * (wi + 1) + (u + 1)] = m
                + integral[v * (wi + 1) + (u + 1)]
                + integral[(v + 1) * (wi + 1) + u]
                - integral[v * (wi + 1) + u];
        }
    }
    let window_sum = |u0: usize, v0: usize, u1: usize, v1: usize| {
        integral[v1 * (wi + 1) + u1] + integral[v0 * (wi + 1) + u0]
            - integral[v0 * (wi + 1) + u1]
            - integral[v1 * (wi + 1) + u0]
    };
    let m = margin as usize;
    let side = (2 * m + 1) as u32;
    let mut out = Vec::new();
    if wi <= 2 * m || hi <= 2 * m {
        return out;
    }
    for v in m..hi - m {
        for u in m..wi - m {
            if window_sum(u - m, v - m, u + m + 1, v + m + 1) == side * side {
                out.push((u as u32, v as u32));
            }
        }
    }
    out
}

/// Uniformly samples `n` distinct ground pixels at least `margin` pixels
/// away from any non-ground pixel. Deterministic for a given generator
/// state.
pub fn sample_ground_points<R: Rng>(
    mask: &ClassImage,
    ground: u8,
    n: usize,
    margin: u32,
    rng: &mut R,
) -> Result<Vec<PixelPoint>, DepthError> {
    let mut eligible = eligible_ground_pixels(mask, ground, margin);
    if eligible.len() < n {
        return Err(DepthError::InsufficientGround {
            eligible: eligible.len(),
            requested: n,
        });
    }
    partial_shuffle(&mut eligible, n, rng);
    Ok(eligible[..n]
        .iter()
        .map(|&(u, v)| PixelPoint::new(u as f64, v as f64))
        .collect())
}

/// Fisher-Yates prefix shuffle: after the call the first `n` elements are a
/// uniform distinct sample.
fn partial_shuffle<T, R: Rng>(items: &mut [T], n: usize, rng: &mut R) {
    let len = items.len();
    for i in 0..n.min(len.saturating_sub(1)) {
        let j = rng.gen_range(i..len);
        items.swap(i, j);
    }
}

/// Per-frame adaptive scale factor: the median over sampled carpet pixels of
/// geometric ground distance divided by predicted relative depth.
///
/// Sampling uses the 10-pixel boundary margin; rays that miss the ground are
/// discarded and replaced from extra candidates (up to three times the
/// requested count). When fewer than `n` eligible pixels exist the whole
/// eligible set is used, provided it reaches [`MIN_GROUND_SAMPLES`].
pub fn adaptive_scale_factor<R: Rng>(
    depth: &DepthMap,
    mask: &ClassImage,
    ground: u8,
    k: &CameraIntrinsics,
    pose: &DronePose,
    n: usize,
    rng: &mut R,
) -> Result<ScaleEstimate, DepthError> {
    let mut eligible = eligible_ground_pixels(mask, ground, DEFAULT_SAMPLE_MARGIN);
    if eligible.len() < MIN_GROUND_SAMPLES.min(n) {
        return Err(DepthError::InsufficientGround {
            eligible: eligible.len(),
            requested: n,
        });
    }
    let budget = (n * RESAMPLE_FACTOR).min(eligible.len());
    partial_shuffle(&mut eligible, budget, rng);

    let mut samples = Vec::with_capacity(n);
    let mut examined = 0usize;
    let mut near_zero = 0usize;
    for &(u, v) in eligible[..budget].iter() {
        if samples.len() == n {
            break;
        }
        examined += 1;
        let rel = depth.get(u, v);
        if rel <= EPSILON_REL {
            near_zero += 1;
            continue;
        }
        let pixel = PixelPoint::new(u as f64, v as f64);
        match distance_to_ground(k, pose, pixel) {
            Ok(d) => samples.push(GroundSample {
                pixel,
                distance_m: d,
                relative: rel,
            }),
            Err(_) => continue, // above the horizon: discard and resample
        }
    }
    if near_zero * 2 > examined {
        return Err(DepthError::DegenerateDepth);
    }
    if samples.len() < MIN_GROUND_SAMPLES.min(n) {
        return Err(DepthError::InsufficientGround {
            eligible: samples.len(),
            requested: n,
        });
    }
    let mut ratios: Vec<f64> = samples.iter().map(|s| s.distance_m / s.relative).collect();
    let scale = median(&mut ratios);
    Ok(ScaleEstimate {
        scale,
        shift: None,
        n_samples: samples.len(),
        samples,
    })
}

/// Applies a scale estimate: `out = scale * depth + shift`.
pub fn metric_depth(depth: &DepthMap, est: &ScaleEstimate) -> DepthMap {
    let shift = est.shift.unwrap_or(0.0);
    let mut out = depth.clone();
    for v in out.values_mut() {
        *v = est.scale * *v + shift;
    }
    out
}

/// Closed-form least squares for `scale * predicted + shift = ground_truth`.
pub fn fit_scale_shift_least_squares(pairs: &[(f64, f64)]) -> Result<(f64, f64), DepthError> {
    if pairs.len() < 2 {
        return Err(DepthError::DegenerateFit);
    }
    let n = pairs.len() as f64;
    let mean_p = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_g = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (min_p, max_p) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    if min_p == max_p {
        return Err(DepthError::DegenerateFit);
    }
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(p, g) in pairs {
        cov += (p - mean_p) * (g - mean_g);
        var += (p - mean_p) * (p - mean_p);
    }
    let scale = cov / var;
    let shift = mean_g - scale * mean_p;
    Ok((scale, shift))
}

/// Global ratio method: the median of `ground_truth / predicted` ratios.
pub fn ratio_scale(pairs: &[(f64, f64)]) -> Result<f64, DepthError> {
    if pairs.is_empty() {
        return Err(DepthError::DivisionDomain);
    }
    if pairs.iter().any(|&(p, _)| p <= 0.0) {
        return Err(DepthError::DivisionDomain);
    }
    let mut ratios: Vec<f64> = pairs.iter().map(|&(p, g)| g / p).collect();
    Ok(median(&mut ratios))
}

/// Mean, median, and minimum over a region of interest.
pub fn roi_stats(map: &DepthMap, roi: RegionOfInterest) -> Result<(f64, f64, f64), DepthError> {
    if roi.u0 >= roi.u1 || roi.v0 >= roi.v1 || roi.u1 > map.width() || roi.v1 > map.height() {
        return Err(DepthError::EmptyRoi);
    }
    let mut values = Vec::with_capacity(((roi.u1 - roi.u0) * (roi.v1 - roi.v0)) as usize);
    for v in roi.v0..roi.v1 {
        for u in roi.u0..roi.u1 {
            values.push(map.get(u, v));
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let med = median(&mut values);
    Ok((mean, med, min))
}
