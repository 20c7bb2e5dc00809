//! Pinhole back-projection and ground-plane ray intersection.
//!
//! All functions operate in the drone-local frame: the camera sits at
//! `T = [x_t, 0, 0]` (height `x_t` above the ground plane `x = 0`), pitched
//! by the gimbal angle `theta` about the lateral axis. Yaw and planar
//! position are composed by the caller (see [`crate::sim`]), which keeps
//! these operations pure functions of height, pitch, and pixel.

use core::fmt;

use nalgebra::{Matrix3, Vector3};

/// A point (or direction) in the drone-local world frame.
///
/// `x` is height above the ground plane, `y` lateral (positive right),
/// `z` forward.
pub type WorldPoint = Vector3<f64>;

/// Pixel coordinates: `u` is the column, `v` the row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
}

impl PixelPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// Validated pinhole intrinsics.
///
/// The assembled matrix `K = [[fx, 0, cx], [0, fy, cy], [0, 0, 1]]` is
/// invertible exactly when `fx > 0` and `fy > 0`, which construction
/// enforces together with the principal point lying inside the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntrinsicsError {
    NonPositiveFocal,
    NonPositiveSize,
    PrincipalPointOutOfBounds,
    NonFinite,
}

impl fmt::Display for IntrinsicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveFocal => write!(f, "focal lengths must be positive"),
            Self::NonPositiveSize => write!(f, "image size must be positive"),
            Self::PrincipalPointOutOfBounds => {
                write!(f, "principal point must lie inside the image")
            }
            Self::NonFinite => write!(f, "intrinsics must be finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IntrinsicsError {}

impl CameraIntrinsics {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    ) -> Result<Self, IntrinsicsError> {
        if !(fx.is_finite() && fy.is_finite() && cx.is_finite() && cy.is_finite()) {
            return Err(IntrinsicsError::NonFinite);
        }
        if fx <= 0.0 || fy <= 0.0 {
            return Err(IntrinsicsError::NonPositiveFocal);
        }
        if width == 0 || height == 0 {
            return Err(IntrinsicsError::NonPositiveSize);
        }
        if cx < 0.0 || cx >= width as f64 || cy < 0.0 || cy >= height as f64 {
            return Err(IntrinsicsError::PrincipalPointOutOfBounds);
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }
    pub fn fy(&self) -> f64 {
        self.fy
    }
    pub fn cx(&self) -> f64 {
        self.cx
    }
    pub fn cy(&self) -> f64 {
        self.cy
    }
    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }

    /// The assembled 3x3 intrinsic matrix K.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    pub fn contains(&self, p: PixelPoint) -> bool {
        p.u >= 0.0 && p.u < self.width as f64 && p.v >= 0.0 && p.v < self.height as f64
    }
}

/// Drone-mounted camera extrinsics relative to the ground plane.
///
/// Fields are public plain data; [`DronePose::validate`] checks the
/// flight-time invariants and is applied at configuration boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DronePose {
    /// Camera height above the ground plane, meters. Must stay positive.
    pub x_t: f64,
    /// Gimbal pitch in radians; negative tilts the camera down.
    pub theta: f64,
    /// Forward offset of the camera from the drone center, meters.
    pub z_c: f64,
    /// Dimensionless focal correction factor applied by the camera-center
    /// refinement.
    pub f_corr: f64,
    /// Heading in the world frame, radians (positive turns left).
    pub yaw: f64,
    /// Drone planar position in the world frame, meters: (lateral, forward).
    pub ground_xy: (f64, f64),
}

impl DronePose {
    /// A level-ground pose at the given camera height and gimbal pitch,
    /// with the default camera offset and no focal correction.
    pub fn at_height(x_t: f64, theta: f64) -> Self {
        Self {
            x_t,
            theta,
            z_c: 0.15,
            f_corr: 1.0,
            yaw: 0.0,
            ground_xy: (0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<(), PoseError> {
        if !(self.x_t.is_finite() && self.theta.is_finite() && self.f_corr.is_finite()) {
            return Err(PoseError::NonFinite);
        }
        if self.x_t <= 0.0 {
            return Err(PoseError::CameraBelowGround);
        }
        if self.f_corr <= 0.0 {
            return Err(PoseError::NonPositiveFocalCorrection);
        }
        if self.theta > 0.0 || self.theta < -core::f64::consts::FRAC_PI_2 {
            return Err(PoseError::PitchOutOfRange);
        }
        Ok(())
    }

    /// Camera translation `T = [x_t, 0, 0]`.
    pub fn translation(&self) -> WorldPoint {
        Vector3::new(self.x_t, 0.0, 0.0)
    }

    /// Refined camera center `C = [x_t, 0, z_c]` used by the corridor
    /// corrections.
    pub fn camera_center(&self) -> WorldPoint {
        Vector3::new(self.x_t, 0.0, self.z_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoseError {
    NonFinite,
    CameraBelowGround,
    NonPositiveFocalCorrection,
    PitchOutOfRange,
}

impl fmt::Display for PoseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFinite => write!(f, "pose values must be finite"),
            Self::CameraBelowGround => write!(f, "camera height must be positive"),
            Self::NonPositiveFocalCorrection => {
                write!(f, "focal correction factor must be positive")
            }
            Self::PitchOutOfRange => write!(f, "gimbal pitch must lie in [-pi/2, 0]"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PoseError {}

/// The sampled ray does not descend toward the ground plane, so it has no
/// ground intersection; callers discard the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HorizonError;

impl fmt::Display for HorizonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ray is parallel to or above the horizon")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HorizonError {}

/// Rotation of the camera frame by the gimbal pitch `theta` about the
/// lateral axis:
///
/// ```text
/// [ cos t   0   sin t ]
/// [   0     1     0   ]
/// [ -sin t  0   cos t ]
/// ```
pub fn rotation_from_pitch(theta: f64) -> Matrix3<f64> {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Back-projects a pixel into a camera-frame direction: `P_c = K^-1 [u v 1]`.
///
/// The returned vector is in image order (horizontal, vertical-down, optical
/// axis); [`to_world`] relabels it into the rotation frame.
pub fn backproject(k: &CameraIntrinsics, p: PixelPoint) -> Vector3<f64> {
    Vector3::new((p.u - k.cx) / k.fx, (p.v - k.cy) / k.fy, 1.0)
}

/// Relabels an image-order direction into the pitch-rotation frame:
/// x up (image up), y lateral (image right), z along the optical axis.
fn camera_axes(p_c: Vector3<f64>) -> Vector3<f64> {
    Vector3::new(-p_c.y, p_c.x, p_c.z)
}

/// Expresses a back-projected camera direction in the drone-local world
/// frame: `P' = R * P_c + T`.
pub fn to_world(pose: &DronePose, p_c: Vector3<f64>) -> WorldPoint {
    rotation_from_pitch(pose.theta) * camera_axes(p_c) + pose.translation()
}

/// Intersects the ray from the camera through `P'` with the ground plane.
///
/// Returns the ground point `P'' = T + lambda (P' - T)` and the ray
/// parameter `lambda = -x_t / (x' - x_t)`. Fails with [`HorizonError`]
/// when the ray does not descend (`x' >= x_t`).
pub fn ground_intersection(
    pose: &DronePose,
    p_c: Vector3<f64>,
) -> Result<(WorldPoint, f64), HorizonError> {
    let t = pose.translation();
    let p_prime = to_world(pose, p_c);
    ground_intersection_from(t, p_prime)
}

/// Ground intersection of the ray from `origin` through `p_prime`, for a
/// general ray origin (used with the corrected camera center).
pub fn ground_intersection_from(
    origin: WorldPoint,
    p_prime: WorldPoint,
) -> Result<(WorldPoint, f64), HorizonError> {
    let dx = p_prime.x - origin.x;
    if dx >= 0.0 || origin.x <= 0.0 {
        return Err(HorizonError);
    }
    let lambda = -origin.x / dx;
    let point = origin + (p_prime - origin) * lambda;
    Ok((point, lambda))
}

/// Applies the camera-center refinement: `P'_center = C + (P' - C) * f`
/// with `C = [x_t, 0, z_c]`.
pub fn camera_center_correction(pose: &DronePose, p_prime: WorldPoint) -> WorldPoint {
    let c = pose.camera_center();
    c + (p_prime - c) * pose.f_corr
}

/// Metric distance from the camera to the ground point seen at pixel `p`.
///
/// Composition of [`backproject`], [`to_world`] and [`ground_intersection`];
/// the distance is measured from the camera translation `T`.
pub fn distance_to_ground(
    k: &CameraIntrinsics,
    pose: &DronePose,
    p: PixelPoint,
) -> Result<f64, HorizonError> {
    let (point, _) = ground_intersection(pose, backproject(k, p))?;
    Ok((point - pose.translation()).norm())
}

/// Like [`distance_to_ground`] with the Eq.-style camera-center corrections
/// applied: the ray is re-centered on `C = [x_t, 0, z_c]` and scaled by the
/// focal correction factor before intersecting the ground.
pub fn distance_to_ground_corrected(
    k: &CameraIntrinsics,
    pose: &DronePose,
    p: PixelPoint,
) -> Result<f64, HorizonError> {
    let p_prime = to_world(pose, backproject(k, p));
    let corrected = camera_center_correction(pose, p_prime);
    let c = pose.camera_center();
    let (point, _) = ground_intersection_from(c, corrected)?;
    Ok((point - c).norm())
}
