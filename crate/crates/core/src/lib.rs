//! skynav-core — vision-only UAV navigation building blocks.
//!
//! The crate is organized around the processing chain of the flight stack:
//!
//! 1. [`geometry`] — pinhole back-projection and ground-plane intersection,
//!    the basis for metric scale recovery.
//! 2. [`depth`] — adaptive per-frame scale factor plus the two global
//!    calibration methods (ratio and least-squares scale/shift).
//! 3. [`corridor`] — the five-plane 3D safety box and maximum-safe-advance
//!    computation.
//! 4. [`seg`] — HSV-patch teacher segmentation: feature extraction,
//!    one-vs-rest linear classifier, grid inference, component filtering,
//!    helipad detection.
//! 5. [`policy`] — the two control policies and the mission state machine.
//! 6. [`sim`] — deterministic raycast digital twin used to exercise the
//!    whole stack end to end.
//!
//! Everything here is `no_std`-compatible (with `alloc`); IO, file formats,
//! and the CLI live in the companion `skynav-cli` crate.
//!
//! # Coordinate convention
//!
//! World X is the up axis (the ground plane is `x = 0`), Y is lateral
//! (positive to the drone's right at yaw 0), Z is forward along the drone
//! heading at yaw 0. The geometry operations work in the drone-local frame;
//! the simulator composes yaw and planar translation outside of them.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod corridor;
pub mod depth;
pub mod geometry;
pub mod img;
pub mod seg;

pub use geometry::{CameraIntrinsics, DronePose, PixelPoint, WorldPoint};
