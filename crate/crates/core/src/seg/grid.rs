//! Grid-based frame segmentation.
//!
//! Patches are classified at grid points with a fixed step; each pixel then
//! takes the label of its nearest grid point within the dilation radius
//! (Euclidean distance, ties to the earlier grid index), which closes the
//! gaps the sparse grid leaves while resolving overlaps deterministically.

use alloc::vec::Vec;

use super::classifier::{classify_patch, OvRClassifier};
use super::hsv::extract_patch_feature;
use crate::geometry::PixelPoint;
use crate::img::{ClassImage, RgbImage, UNKNOWN_CLASS};

pub const DEFAULT_GRID_STEP: u32 = 5;
pub const DEFAULT_DILATION_RADIUS: u32 = 3;

/// Classifies `patch`-sized patches every `step` pixels and paints each
/// pixel with the label of its nearest grid point within
/// `dilation_radius`; pixels with no grid point in range stay
/// [`UNKNOWN_CLASS`].
pub fn segment_frame_grid(
    image: &RgbImage,
    clf: &OvRClassifier,
    step: u32,
    patch: u32,
    dilation_radius: u32,
) -> ClassImage {
    assert!(step >= 1);
    let (w, h) = (image.width(), image.height());
    let cols = (w + step - 1) / step;
    let rows = (h + step - 1) / step;

    let mut grid_labels: Vec<u8> = Vec::with_capacity((cols * rows) as usize);
    for gv in 0..rows {
        for gu in 0..cols {
            let center = PixelPoint::new((gu * step) as f64, (gv * step) as f64);
            let label = extract_patch_feature(image, center, patch)
                .map(|f| classify_patch(clf, &f))
                .unwrap_or(UNKNOWN_CLASS);
            grid_labels.push(label);
        }
    }

    let r = dilation_radius as i64;
    let mut out = ClassImage::filled(w, h, UNKNOWN_CLASS);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            // Grid points whose square dilation kernel covers (x, y).
            let gu0 = ((x - r).max(0) + step as i64 - 1) / step as i64;
            let gu1 = (x + r).min(w as i64 - 1) / step as i64;
            let gv0 = ((y - r).max(0) + step as i64 - 1) / step as i64;
            let gv1 = (y + r).min(h as i64 - 1) / step as i64;
            let mut best: Option<(i64, u32)> = None; // (distance^2, grid index)
            for gv in gv0..=gv1 {
                for gu in gu0..=gu1 {
                    let du = x - gu * step as i64;
                    let dv = y - gv * step as i64;
                    if du.abs() > r || dv.abs() > r {
                        continue;
                    }
                    let d2 = du * du + dv * dv;
                    let idx = (gv as u32) * cols + gu as u32;
                    // Scan order is ascending grid index, so a strict
                    // comparison keeps the earlier index on ties.
                    if best.map_or(true, |(bd, _)| d2 < bd) {
                        best = Some((d2, idx));
                    }
                }
            }
            if let Some((_, idx)) = best {
                out.set(x as u32, y as u32, grid_labels[idx as usize]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seg::classifier::{train_one_vs_rest, TrainParams};
    use crate::seg::hsv::HsvHistogramFeature;
    use alloc::vec;

    fn color_feature(color: [u8; 3]) -> HsvHistogramFeature {
        let img = RgbImage::filled(40, 40, color);
        extract_patch_feature(&img, PixelPoint::new(20.0, 20.0), 40).unwrap()
    }

    fn two_color_classifier() -> OvRClassifier {
        let red = color_feature([220, 30, 30]);
        let blue = color_feature([30, 30, 220]);
        let features = vec![red.clone(), blue.clone(), red, blue];
        let labels = vec![0u8, 1, 0, 1];
        train_one_vs_rest(&features, &labels, 2, &TrainParams::default()).unwrap()
    }

    #[test]
    fn uniform_image_gets_one_label_everywhere() {
        let clf = two_color_classifier();
        let img = RgbImage::filled(60, 45, [220, 30, 30]);
        let seg = segment_frame_grid(&img, &clf, 5, 40, 3);
        // Every labeled pixel carries the single class; only the strip past
        // the last grid point plus the dilation radius may stay unknown.
        assert!(seg
            .labels()
            .iter()
            .all(|&l| l == 0 || l == UNKNOWN_CLASS));
        for v in 0..43 {
            for u in 0..58 {
                assert_eq!(seg.get(u, v), 0, "pixel ({u},{v})");
            }
        }
    }

    #[test]
    fn dense_grid_is_per_pixel_classification() {
        let clf = two_color_classifier();
        let mut img = RgbImage::filled(30, 20, [220, 30, 30]);
        for v in 0..20 {
            for u in 15..30 {
                img.set(u, v, [30, 30, 220]);
            }
        }
        let seg = segment_frame_grid(&img, &clf, 1, 1, 0);
        for v in 0..20 {
            for u in 0..30 {
                assert_eq!(seg.get(u, v), if u < 15 { 0 } else { 1 });
            }
        }
    }

    #[test]
    fn split_image_labels_follow_regions() {
        let clf = two_color_classifier();
        let mut img = RgbImage::filled(120, 80, [220, 30, 30]);
        for v in 0..80 {
            for u in 60..120 {
                img.set(u, v, [30, 30, 220]);
            }
        }
        let seg = segment_frame_grid(&img, &clf, 5, 40, 3);
        // Away from the boundary and image edges the labels must be exact.
        for v in 25..55 {
            for u in 10..30 {
                assert_eq!(seg.get(u, v), 0);
            }
            for u in 90..110 {
                assert_eq!(seg.get(u, v), 1);
            }
        }
    }

    #[test]
    fn labels_cover_the_interior() {
        let clf = two_color_classifier();
        let img = RgbImage::filled(64, 64, [30, 30, 220]);
        let seg = segment_frame_grid(&img, &clf, 5, 40, 3);
        // Step 5 with radius 3: every pixel within the grid span is covered.
        for v in 0..60 {
            for u in 0..60 {
                assert_ne!(seg.get(u, v), UNKNOWN_CLASS, "pixel ({u},{v})");
            }
        }
    }
}
