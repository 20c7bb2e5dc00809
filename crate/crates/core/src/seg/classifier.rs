//! One-vs-rest linear classifier over HSV patch features.
//!
//! One hinge-loss binary classifier per class, trained by full-batch
//! subgradient descent with L2 regularization. Full-batch updates make
//! training deterministic and invariant to sample duplication, and the
//! histogram features of distinct textures are close to orthogonal, so a
//! handful of epochs separates them.

use alloc::vec;
use alloc::vec::Vec;

use super::hsv::{HsvHistogramFeature, SegError, FEATURE_DIM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub epochs: u32,
    /// L2 regularization strength.
    pub l2: f64,
    /// Base learning rate; epoch t uses `rate / sqrt(t)`.
    pub rate: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            epochs: 50,
            l2: 1e-4,
            rate: 0.1,
        }
    }
}

/// Per-class linear scores `w_c . x + b_c`; prediction is the argmax with
/// ties broken toward the lowest class id.
#[derive(Debug, Clone, PartialEq)]
pub struct OvRClassifier {
    num_classes: u8,
    /// Row-major `num_classes x FEATURE_DIM`.
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl OvRClassifier {
    pub fn from_parts(num_classes: u8, weights: Vec<f64>, biases: Vec<f64>) -> Option<Self> {
        (weights.len() == num_classes as usize * FEATURE_DIM
            && biases.len() == num_classes as usize
            && weights.iter().chain(biases.iter()).all(|x| x.is_finite()))
        .then_some(Self {
            num_classes,
            weights,
            biases,
        })
    }

    pub fn num_classes(&self) -> u8 {
        self.num_classes
    }

    pub fn class_weights(&self, class: u8) -> (&[f64], f64) {
        let i = class as usize;
        (
            &self.weights[i * FEATURE_DIM..(i + 1) * FEATURE_DIM],
            self.biases[i],
        )
    }

    pub fn scores(&self, feature: &HsvHistogramFeature) -> Vec<f64> {
        (0..self.num_classes)
            .map(|c| {
                let (w, b) = self.class_weights(c);
                dot(w, feature.as_slice()) + b
            })
            .collect()
    }

    /// Training-set (or any labeled set) accuracy.
    pub fn accuracy(&self, features: &[HsvHistogramFeature], labels: &[u8]) -> f64 {
        let correct = features
            .iter()
            .zip(labels)
            .filter(|(f, &l)| classify_patch(self, f) == l)
            .count();
        correct as f64 / features.len().max(1) as f64
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Trains one linear hinge classifier per class id in `0..num_classes`.
///
/// Requires at least two distinct labels and at least one sample per class.
pub fn train_one_vs_rest(
    features: &[HsvHistogramFeature],
    labels: &[u8],
    num_classes: u8,
    params: &TrainParams,
) -> Result<OvRClassifier, SegError> {
    assert_eq!(features.len(), labels.len());
    let mut counts = vec![0usize; num_classes as usize];
    for &l in labels {
        counts[l as usize] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(SegError::TooFewClasses);
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(SegError::DegenerateData { class: class as u8 });
    }

    let n = features.len() as f64;
    let mut weights = vec![0.0f64; num_classes as usize * FEATURE_DIM];
    let mut biases = vec![0.0f64; num_classes as usize];

    for class in 0..num_classes as usize {
        let w = &mut weights[class * FEATURE_DIM..(class + 1) * FEATURE_DIM];
        let b = &mut biases[class];
        let mut grad = [0.0f64; FEATURE_DIM];
        for epoch in 1..=params.epochs {
            let rate = params.rate / libm::sqrt(epoch as f64);
            grad.fill(0.0);
            let mut grad_b = 0.0;
            for (f, &l) in features.iter().zip(labels) {
                let y = if l as usize == class { 1.0 } else { -1.0 };
                let margin = y * (dot(w, f.as_slice()) + *b);
                if margin < 1.0 {
                    for (g, &x) in grad.iter_mut().zip(f.as_slice()) {
                        *g -= y * x;
                    }
                    grad_b -= y;
                }
            }
            for (wi, g) in w.iter_mut().zip(grad.iter()) {
                *wi -= rate * (params.l2 * *wi + g / n);
            }
            *b -= rate * grad_b / n;
        }
    }
    Ok(OvRClassifier {
        num_classes,
        weights,
        biases,
    })
}

/// Argmax over per-class scores; ties break to the lowest class id.
pub fn classify_patch(clf: &OvRClassifier, feature: &HsvHistogramFeature) -> u8 {
    let mut best = 0u8;
    let mut best_score = f64::NEG_INFINITY;
    for c in 0..clf.num_classes {
        let (w, b) = clf.class_weights(c);
        let s = dot(w, feature.as_slice()) + b;
        if s > best_score {
            best_score = s;
            best = c;
        }
    }
    best
}
