//! HSV-patch teacher segmentation pipeline.

mod classifier;
mod components;
mod grid;
mod helipad;
mod hsv;

pub use classifier::{classify_patch, train_one_vs_rest, OvRClassifier, TrainParams};
pub use components::{components_of, largest_component_filter, Component};
pub use grid::{segment_frame_grid, DEFAULT_DILATION_RADIUS, DEFAULT_GRID_STEP};
pub use helipad::{detect_helipad, HelipadDetection, HelipadParams};
pub use hsv::{
    extract_patch_feature, rgb_to_hsv, HsvHistogramFeature, SegError, DEFAULT_PATCH_SIZE,
    FEATURE_DIM, HUE_BINS, SAT_BINS, VAL_BINS,
};
