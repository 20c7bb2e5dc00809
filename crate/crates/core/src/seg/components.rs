//! Connected-component analysis over class images.

use alloc::vec;
use alloc::vec::Vec;

use crate::img::{class_id, ClassImage, UNKNOWN_CLASS};

/// One 4-connected component of a single class.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub class: u8,
    pub area: usize,
    /// Bounding box, half-open: (u0, v0, u1, v1).
    pub bbox: (u32, u32, u32, u32),
    pub centroid: (f64, f64),
    /// Row-major index of the first pixel encountered; stable ordering key.
    pub anchor: usize,
    pub pixels: Vec<u32>,
}

impl Component {
    pub fn bbox_area(&self) -> usize {
        ((self.bbox.2 - self.bbox.0) as usize) * ((self.bbox.3 - self.bbox.1) as usize)
    }

    /// Fraction of the bounding box covered by the component.
    pub fn fill_ratio(&self) -> f64 {
        self.area as f64 / self.bbox_area().max(1) as f64
    }
}

/// All 4-connected components of `class`, in scan order of their anchors.
pub fn components_of(img: &ClassImage, class: u8) -> Vec<Component> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels = img.labels();
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..w * h {
        if visited[start] || labels[start] != class {
            continue;
        }
        let mut area = 0usize;
        let (mut u0, mut v0, mut u1, mut v1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        let (mut su, mut sv) = (0.0f64, 0.0f64);
        let mut pixels = Vec::new();
        visited[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (u, v) = ((i % w) as u32, (i / w) as u32);
            area += 1;
            su += u as f64;
            sv += v as f64;
            u0 = u0.min(u);
            v0 = v0.min(v);
            u1 = u1.max(u + 1);
            v1 = v1.max(v + 1);
            pixels.push(i as u32);
            let mut push = |j: usize| {
                if !visited[j] && labels[j] == class {
                    visited[j] = true;
                    stack.push(j);
                }
            };
            if u > 0 {
                push(i - 1);
            }
            if (u as usize) + 1 < w {
                push(i + 1);
            }
            if v > 0 {
                push(i - w);
            }
            if (v as usize) + 1 < h {
                push(i + w);
            }
        }
        out.push(Component {
            class,
            area,
            bbox: (u0, v0, u1, v1),
            centroid: (su / area as f64, sv / area as f64),
            anchor: start,
            pixels,
        });
    }
    out
}

/// Keeps only the largest 4-connected component of every class except
/// background and carpet (which may legitimately be disconnected);
/// smaller components are relabeled [`UNKNOWN_CLASS`]. Ties keep the
/// component with the earliest anchor.
pub fn largest_component_filter(img: &ClassImage) -> ClassImage {
    let mut out = img.clone();
    let mut present = [false; 256];
    for &l in img.labels() {
        present[l as usize] = true;
    }
    for class in 0..crate::img::NUM_CLASSES {
        if class == class_id::BACKGROUND || class == class_id::CARPET {
            continue;
        }
        if !present[class as usize] {
            continue;
        }
        let comps = components_of(img, class);
        if comps.len() <= 1 {
            continue;
        }
        let keep = comps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.area.cmp(&b.1.area).then(b.1.anchor.cmp(&a.1.anchor)))
            .map(|(i, _)| i)
            .unwrap();
        for (i, comp) in comps.iter().enumerate() {
            if i == keep {
                continue;
            }
            for &p in &comp.pixels {
                out.labels_mut()[p as usize] = UNKNOWN_CLASS;
            }
        }
    }
    out
}
