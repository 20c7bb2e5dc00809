//! Helipad detection from component pairs.
//!
//! The landing pad appears as two classes: the "H" sign and the striped box
//! around it. Candidate component pairs are scored by centroid proximity
//! (normalized by the union bounding-box diagonal), penalized for the sign
//! not being contained in the box footprint and for low fill-ratio
//! compactness; the best pair above the threshold is the detection.

use libm::sqrt;

use super::components::{components_of, Component};
use crate::geometry::PixelPoint;
use crate::img::{class_id, ClassImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelipadParams {
    pub h_class: u8,
    pub box_class: u8,
    /// Components below this area (pixels) are ignored.
    pub min_area: usize,
    /// Pair score threshold on [0, 1].
    pub score_threshold: f64,
}

impl Default for HelipadParams {
    fn default() -> Self {
        Self {
            h_class: class_id::HELIPAD_H,
            box_class: class_id::HELIPAD_BOX,
            min_area: 20,
            score_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelipadDetection {
    /// Centroid of the "H" component.
    pub center: PixelPoint,
    /// Union bounding box of the pair, half-open.
    pub bbox: (u32, u32, u32, u32),
    pub score: f64,
}

fn bbox_union(a: (u32, u32, u32, u32), b: (u32, u32, u32, u32)) -> (u32, u32, u32, u32) {
    (a.0.min(b.0), a.1.min(b.1), a.2.max(b.2), a.3.max(b.3))
}

fn bbox_overlap(a: (u32, u32, u32, u32), b: (u32, u32, u32, u32)) -> usize {
    let w = a.2.min(b.2).saturating_sub(a.0.max(b.0)) as usize;
    let h = a.3.min(b.3).saturating_sub(a.1.max(b.1)) as usize;
    w * h
}

fn pair_score(h: &Component, bx: &Component) -> f64 {
    let union = bbox_union(h.bbox, bx.bbox);
    let du = (union.2 - union.0) as f64;
    let dv = (union.3 - union.1) as f64;
    let diag = sqrt(du * du + dv * dv).max(1.0);
    let dist = {
        let dx = h.centroid.0 - bx.centroid.0;
        let dy = h.centroid.1 - bx.centroid.1;
        sqrt(dx * dx + dy * dy)
    };
    let proximity = 1.0 - (dist / diag).min(1.0);
    let containment = bbox_overlap(h.bbox, bx.bbox) as f64 / h.bbox_area().max(1) as f64;
    let compactness = sqrt(h.fill_ratio() * bx.fill_ratio());
    proximity * containment * compactness
}

/// Finds the best H/box component pair; absent when either class is
/// missing or no pair beats the score threshold.
pub fn detect_helipad(mask: &ClassImage, params: &HelipadParams) -> Option<HelipadDetection> {
    let h_comps: alloc::vec::Vec<Component> = components_of(mask, params.h_class)
        .into_iter()
        .filter(|c| c.area >= params.min_area)
        .collect();
    let box_comps: alloc::vec::Vec<Component> = components_of(mask, params.box_class)
        .into_iter()
        .filter(|c| c.area >= params.min_area)
        .collect();
    let mut best: Option<(f64, &Component, &Component)> = None;
    for h in &h_comps {
        for bx in &box_comps {
            let score = pair_score(h, bx);
            if best.map_or(true, |(s, _, _)| score > s) {
                best = Some((score, h, bx));
            }
        }
    }
    let (score, h, bx) = best?;
    (score >= params.score_threshold).then(|| HelipadDetection {
        center: PixelPoint::new(h.centroid.0, h.centroid.1),
        bbox: bbox_union(h.bbox, bx.bbox),
        score,
    })
}
