//! The five-plane 3D virtual safety box.
//!
//! Five axis-aligned planes — low/high (height), left/right (lateral), and
//! front — bound a conceptual corridor around the drone. Rays from the
//! camera are intersected with each plane; the constraint `lambda > 1`
//! keeps only intersections beyond the back-projected reference point, and
//! the minimum Euclidean hit distance decides which plane a viewed point
//! would reach first. Metric obstacle points that fall inside the box are
//! breaches; the exit plane of their ray names the side the obstacle is on.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::Vector3;

use crate::geometry::{
    backproject, camera_center_correction, to_world, CameraIntrinsics, DronePose, PixelPoint,
    WorldPoint,
};
use crate::img::DepthMap;

/// Corridor planes, in tie-break priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    Front,
    Right,
    Left,
    High,
    Low,
}

impl Plane {
    pub const ALL: [Plane; 5] = [Plane::Front, Plane::Right, Plane::Left, Plane::High, Plane::Low];

    pub fn name(&self) -> &'static str {
        match self {
            Plane::Front => "front",
            Plane::Right => "right",
            Plane::Left => "left",
            Plane::High => "high",
            Plane::Low => "low",
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Plane positions in meters. `x_low`/`x_high` are absolute heights;
/// `y_left` is negative, `y_right` positive; `z_front` ahead of the drone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorConfig {
    pub x_low: f64,
    pub x_high: f64,
    pub y_left: f64,
    pub y_right: f64,
    pub z_front: f64,
}

impl CorridorConfig {
    /// The default box: lateral planes at +/-0.5 m, frontal plane at 2 m,
    /// vertical planes 0.8 m below and above the drone height.
    pub fn around_height(x_t: f64) -> Self {
        Self {
            x_low: x_t - 0.8,
            x_high: x_t + 0.8,
            y_left: -0.5,
            y_right: 0.5,
            z_front: 2.0,
        }
    }

    pub fn validate(&self) -> Result<(), CorridorConfigError> {
        if !(self.x_low < self.x_high) {
            return Err(CorridorConfigError::VerticalOrder);
        }
        if !(self.y_left < 0.0 && 0.0 < self.y_right) {
            return Err(CorridorConfigError::LateralSign);
        }
        if !(self.z_front > 0.0) {
            return Err(CorridorConfigError::FrontNonPositive);
        }
        Ok(())
    }

    fn coordinate(&self, plane: Plane) -> f64 {
        match plane {
            Plane::Low => self.x_low,
            Plane::High => self.x_high,
            Plane::Left => self.y_left,
            Plane::Right => self.y_right,
            Plane::Front => self.z_front,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorridorConfigError {
    VerticalOrder,
    LateralSign,
    FrontNonPositive,
}

impl fmt::Display for CorridorConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VerticalOrder => write!(f, "x_low must be below x_high"),
            Self::LateralSign => write!(f, "y_left must be negative and y_right positive"),
            Self::FrontNonPositive => write!(f, "z_front must be positive"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CorridorConfigError {}

/// A ray/plane intersection with `lambda > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneHit {
    pub plane: Plane,
    pub lambda: f64,
    pub point: WorldPoint,
    /// Euclidean distance from the ray origin to the hit point, meters.
    pub distance: f64,
}

/// The five ray parameters of the corridor planes, ordered as
/// [`Plane::ALL`]. A value is absent when the ray is parallel to the plane
/// or the intersection lies at `lambda <= 1`.
pub fn plane_lambdas(
    p_prime: WorldPoint,
    origin: WorldPoint,
    cfg: &CorridorConfig,
) -> [Option<f64>; 5] {
    let coord = |plane: Plane, p: &WorldPoint| match plane {
        Plane::Low | Plane::High => p.x,
        Plane::Left | Plane::Right => p.y,
        Plane::Front => p.z,
    };
    let mut out = [None; 5];
    for (i, plane) in Plane::ALL.iter().enumerate() {
        let denom = coord(*plane, &p_prime) - coord(*plane, &origin);
        if denom == 0.0 {
            continue;
        }
        let lambda = (cfg.coordinate(*plane) - coord(*plane, &origin)) / denom;
        if lambda > 1.0 {
            out[i] = Some(lambda);
        }
    }
    out
}

/// The plane the ray from `origin` through `p_prime` reaches first beyond
/// `p_prime`: the valid hit with minimum Euclidean distance. Equal
/// distances resolve by the fixed priority front > right > left > high > low.
pub fn first_intersection(
    p_prime: WorldPoint,
    origin: WorldPoint,
    cfg: &CorridorConfig,
) -> Option<PlaneHit> {
    let lambdas = plane_lambdas(p_prime, origin, cfg);
    let dir = p_prime - origin;
    let len = dir.norm();
    let mut best: Option<PlaneHit> = None;
    for (i, plane) in Plane::ALL.iter().enumerate() {
        let Some(lambda) = lambdas[i] else { continue };
        let distance = lambda * len;
        if best.as_ref().map_or(true, |b| distance < b.distance) {
            best = Some(PlaneHit {
                plane: *plane,
                lambda,
                point: origin + dir * lambda,
                distance,
            });
        }
    }
    best
}

/// Outcome of projecting one metric point against the corridor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreachReport {
    /// The plane whose side the obstacle is on, when the point lies inside
    /// the corridor volume; `None` means clear.
    pub breach: Option<Plane>,
    /// Metric distance from the camera to the obstacle point.
    pub distance: f64,
}

fn inside_corridor(point: &WorldPoint, origin_z: f64, cfg: &CorridorConfig) -> bool {
    // Boundary points count as breaches; points behind the camera do not.
    point.x >= cfg.x_low
        && point.x <= cfg.x_high
        && point.y >= cfg.y_left
        && point.y <= cfg.y_right
        && point.z <= cfg.z_front
        && point.z > origin_z
}

/// Places the pixel's metric 3D point (camera-center corrections applied)
/// and reports whether it breaches the corridor, naming the plane its ray
/// exits through first.
pub fn corridor_breach(
    pixel: PixelPoint,
    metric_d: f64,
    k: &CameraIntrinsics,
    pose: &DronePose,
    cfg: &CorridorConfig,
) -> BreachReport {
    let p_prime = camera_center_correction(pose, to_world(pose, backproject(k, pixel)));
    let origin = pose.camera_center();
    let dir = p_prime - origin;
    let unit = dir / dir.norm();
    let point = origin + unit * metric_d;
    let breach = if inside_corridor(&point, origin.z, cfg) {
        Some(
            first_intersection(p_prime, origin, cfg)
                .map(|h| h.plane)
                .unwrap_or(Plane::Front),
        )
    } else {
        None
    };
    BreachReport {
        breach,
        distance: metric_d,
    }
}

/// Per-pixel corridor geometry, independent of depth; precompute once per
/// (intrinsics, pose, corridor) and reuse across frames.
#[derive(Debug, Clone)]
pub struct CorridorGrid {
    width: u32,
    height: u32,
    origin: WorldPoint,
    cfg: CorridorConfig,
    unit_dirs: Vec<Vector3<f64>>,
    exit_plane: Vec<Option<Plane>>,
}

/// Frame-level corridor summary used by the depth policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorAssessment {
    /// Nearest breaching point, if any: its ray's exit plane and distance.
    pub breach: Option<(Plane, f64)>,
    /// Maximum safe forward advance in meters, already clamped to the cap.
    pub advance_m: f64,
    /// Mean forward clearance beyond the frontal plane per image half, over
    /// front-exiting pixels; `None` when a half has no such pixels.
    pub clearance_left: Option<f64>,
    pub clearance_right: Option<f64>,
}

impl CorridorGrid {
    pub fn new(k: &CameraIntrinsics, pose: &DronePose, cfg: CorridorConfig) -> Self {
        let (w, h) = (k.width(), k.height());
        let origin = pose.camera_center();
        let mut unit_dirs = Vec::with_capacity((w * h) as usize);
        let mut exit_plane = Vec::with_capacity((w * h) as usize);
        for v in 0..h {
            for u in 0..w {
                let pixel = PixelPoint::new(u as f64, v as f64);
                let p_prime =
                    camera_center_correction(pose, to_world(pose, backproject(k, pixel)));
                let dir = p_prime - origin;
                unit_dirs.push(dir / dir.norm());
                exit_plane.push(first_intersection(p_prime, origin, &cfg).map(|h| h.plane));
            }
        }
        Self {
            width: w,
            height: h,
            origin,
            cfg,
            unit_dirs,
            exit_plane,
        }
    }

    pub fn config(&self) -> &CorridorConfig {
        &self.cfg
    }

    /// Scans a metric depth map: nearest breach, per-half clearance, and
    /// the maximum safe advance (0 whenever any breach exists).
    pub fn assess(&self, metric: &DepthMap, cap: f64) -> CorridorAssessment {
        assert_eq!(metric.width(), self.width);
        assert_eq!(metric.height(), self.height);
        let mut breach: Option<(Plane, f64)> = None;
        let mut min_forward = f64::INFINITY;
        let mut sum_left = 0.0;
        let mut n_left = 0usize;
        let mut sum_right = 0.0;
        let mut n_right = 0usize;
        let half = self.width / 2;
        for v in 0..self.height {
            for u in 0..self.width {
                let i = (v * self.width + u) as usize;
                let d = metric.values()[i];
                let point = self.origin + self.unit_dirs[i] * d;
                if inside_corridor(&point, self.origin.z, &self.cfg) {
                    let plane = self.exit_plane[i].unwrap_or(Plane::Front);
                    if breach.map_or(true, |(_, bd)| d < bd) {
                        breach = Some((plane, d));
                    }
                }
                if self.exit_plane[i] == Some(Plane::Front) {
                    let clearance = point.z - self.cfg.z_front;
                    min_forward = min_forward.min(clearance);
                    if u < half {
                        sum_left += clearance;
                        n_left += 1;
                    } else {
                        sum_right += clearance;
                        n_right += 1;
                    }
                }
            }
        }
        let advance_m = if breach.is_some() {
            0.0
        } else if min_forward.is_finite() {
            min_forward.clamp(0.0, cap)
        } else {
            cap
        };
        CorridorAssessment {
            breach,
            advance_m,
            clearance_left: (n_left > 0).then(|| sum_left / n_left as f64),
            clearance_right: (n_right > 0).then(|| sum_right / n_right as f64),
        }
    }
}

/// Maximum safe forward travel given a metric depth map: the minimum
/// forward clearance beyond the frontal plane over front-exiting pixels,
/// clamped to `[0, cap]`; 0 whenever any corridor breach exists.
pub fn max_safe_advance(
    metric: &DepthMap,
    k: &CameraIntrinsics,
    pose: &DronePose,
    cfg: &CorridorConfig,
    cap: f64,
) -> f64 {
    CorridorGrid::new(k, pose, cfg.clone()).assess(metric, cap).advance_m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_cfg() -> CorridorConfig {
        CorridorConfig::around_height(1.5)
    }

    /// Oracle: march the ray beyond `p_prime` in fine arc-length steps and
    /// report the first plane whose outside half-space is newly entered.
    /// Each coordinate is linear in arc length, so bracketing with a coarse
    /// step and refining the bracket reproduces the fine march exactly.
    fn march_first_plane(
        p_prime: WorldPoint,
        origin: WorldPoint,
        cfg: &CorridorConfig,
        fine: f64,
        max_dist: f64,
    ) -> Option<(Plane, f64)> {
        let dir = p_prime - origin;
        let len = dir.norm();
        let unit = dir / len;
        let outside = |s: f64, plane: Plane| -> bool {
            let p = origin + unit * s;
            match plane {
                Plane::Low => p.x <= cfg.x_low,
                Plane::High => p.x >= cfg.x_high,
                Plane::Left => p.y <= cfg.y_left,
                Plane::Right => p.y >= cfg.y_right,
                Plane::Front => p.z >= cfg.z_front,
            }
        };
        let start: Vec<bool> = Plane::ALL.iter().map(|&pl| outside(len, pl)).collect();
        let newly = |s: f64| -> Option<Plane> {
            Plane::ALL
                .iter()
                .enumerate()
                .find(|&(i, &pl)| !start[i] && outside(s, pl))
                .map(|(_, &pl)| pl)
        };
        let coarse = fine * 100.0;
        let mut s = len;
        while s <= max_dist {
            if newly(s).is_some() {
                let mut t = (s - coarse).max(len);
                loop {
                    if let Some(pl) = newly(t) {
                        return Some((pl, t));
                    }
                    t += fine;
                }
            }
            s += coarse;
        }
        None
    }

    #[test]
    fn pure_forward_ray_hits_front_only() {
        let origin = Vector3::new(1.5, 0.0, 0.0);
        let p_prime = Vector3::new(1.5, 0.0, 1.0);
        let cfg = default_cfg();
        let lambdas = plane_lambdas(p_prime, origin, &cfg);
        assert_eq!(lambdas, [Some(2.0), None, None, None, None]);
        let hit = first_intersection(p_prime, origin, &cfg).unwrap();
        assert_eq!(hit.plane, Plane::Front);
        assert!((hit.distance - 2.0).abs() < 1e-12);
        assert!((hit.point - Vector3::new(1.5, 0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn right_lambda_constraint() {
        let origin = Vector3::new(1.5, 0.0, 0.0);
        let cfg = default_cfg();
        // Reference point already beyond the plane: lambda = 0.5 <= 1, absent.
        let lambdas = plane_lambdas(Vector3::new(1.5, 1.0, 0.0), origin, &cfg);
        assert_eq!(lambdas[1], None);
        // Closer reference point: lambda = 2.
        let lambdas = plane_lambdas(Vector3::new(1.5, 0.25, 0.0), origin, &cfg);
        assert_eq!(lambdas[1], Some(2.0));
    }

    #[test]
    fn diagonal_ray_exits_right_before_front() {
        let origin = Vector3::new(1.5, 0.0, 0.0);
        let p_prime = origin + Vector3::new(0.0, 1.0, 1.0) * 0.25;
        let hit = first_intersection(p_prime, origin, &default_cfg()).unwrap();
        assert_eq!(hit.plane, Plane::Right);
        assert!((hit.distance - 0.5 * core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn emitted_hits_satisfy_plane_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cfg = default_cfg();
        for _ in 0..2_000 {
            let origin = Vector3::new(rng.gen_range(0.8..2.2), 0.0, rng.gen_range(-0.1..0.2));
            let p_prime = origin
                + Vector3::new(
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(-0.3..1.0),
                );
            let lambdas = plane_lambdas(p_prime, origin, &cfg);
            for (i, plane) in Plane::ALL.iter().enumerate() {
                let Some(lambda) = lambdas[i] else { continue };
                assert!(lambda > 1.0);
                let point = origin + (p_prime - origin) * lambda;
                let err = match plane {
                    Plane::Low => (point.x - cfg.x_low).abs(),
                    Plane::High => (point.x - cfg.x_high).abs(),
                    Plane::Left => (point.y - cfg.y_left).abs(),
                    Plane::Right => (point.y - cfg.y_right).abs(),
                    Plane::Front => (point.z - cfg.z_front).abs(),
                };
                assert!(err < 1e-9, "plane {plane:?} err {err}");
            }
        }
    }

    #[test]
    fn first_intersection_matches_march_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let cfg = default_cfg();
        let origin = Vector3::new(1.5, 0.0, 0.15);
        let mut checked = 0;
        while checked < 500 {
            // Short reference offsets keep lambda > 1 hits in play.
            let p_prime = origin
                + Vector3::new(
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.2..0.6),
                );
            if (p_prime - origin).norm() < 1e-3 {
                continue;
            }
            let analytic = first_intersection(p_prime, origin, &cfg);
            // Exclude near-ties between the two closest hits.
            let lambdas = plane_lambdas(p_prime, origin, &cfg);
            let len = (p_prime - origin).norm();
            let mut dists: Vec<f64> = lambdas.iter().flatten().map(|l| l * len).collect();
            dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            if dists.len() >= 2 && (dists[1] - dists[0]).abs() < 1e-6 {
                continue;
            }
            let marched = march_first_plane(p_prime, origin, &cfg, 1e-4, 50.0);
            match (analytic, marched) {
                (Some(hit), Some((plane, dist))) => {
                    assert_eq!(hit.plane, plane, "p_prime {p_prime:?}");
                    assert!((hit.distance - dist).abs() < 1e-2);
                }
                (None, None) => {}
                (a, m) => panic!("analytic {a:?} vs marched {m:?} for {p_prime:?}"),
            }
            checked += 1;
        }
    }

    fn test_camera() -> (CameraIntrinsics, DronePose) {
        (
            CameraIntrinsics::new(240.0, 240.0, 160.0, 128.0, 320, 256).unwrap(),
            DronePose::at_height(1.5, 0.0),
        )
    }

    #[test]
    fn far_point_is_clear() {
        let (k, pose) = test_camera();
        let report = corridor_breach(
            PixelPoint::new(160.0, 128.0),
            5.0,
            &k,
            &pose,
            &default_cfg(),
        );
        assert_eq!(report.breach, None);
        assert_eq!(report.distance, 5.0);
    }

    #[test]
    fn near_centered_point_breaches_front() {
        let (k, pose) = test_camera();
        let report = corridor_breach(
            PixelPoint::new(160.0, 128.0),
            1.0,
            &k,
            &pose,
            &default_cfg(),
        );
        assert_eq!(report.breach, Some(Plane::Front));
    }

    #[test]
    fn offset_point_breaches_right() {
        let (k, pose) = test_camera();
        // A pixel offset right: lateral direction 80/240, so the right-plane
        // hit (lambda = 1.5) comes before the frontal one (lambda = 1.85).
        let pixel = PixelPoint::new(240.0, 128.0);
        let report = corridor_breach(pixel, 0.9, &k, &pose, &default_cfg());
        assert_eq!(report.breach, Some(Plane::Right));
    }

    #[test]
    fn ground_points_are_below_the_corridor() {
        let (k, _) = test_camera();
        let pose = DronePose::at_height(1.5, -25.0f64.to_radians());
        // A pixel low in the image looking at the ground ~2.2 m away.
        let pixel = PixelPoint::new(160.0, 240.0);
        let d = crate::geometry::distance_to_ground(&k, &pose, pixel).unwrap();
        let report = corridor_breach(pixel, d, &k, &pose, &default_cfg());
        assert_eq!(report.breach, None, "ground at distance {d}");
    }

    #[test]
    fn advance_caps_in_open_space() {
        let (k, pose) = test_camera();
        let metric = DepthMap::filled(320, 256, 10.0);
        let adv = max_safe_advance(&metric, &k, &pose, &default_cfg(), 1.0);
        assert_eq!(adv, 1.0);
    }

    #[test]
    fn wall_at_front_plane_blocks_advance() {
        let (k, pose) = test_camera();
        // Every ray reports a depth that places its point exactly on the
        // frontal plane: boundary counts as breach, advance is zero.
        let cfg = default_cfg();
        let grid = CorridorGrid::new(&k, &pose, cfg.clone());
        let mut metric = DepthMap::filled(320, 256, 0.0);
        for v in 0..256 {
            for u in 0..320 {
                let i = (v * 320 + u) as usize;
                let unit = grid.unit_dirs[i];
                if unit.z > 1e-6 {
                    let d = (cfg.z_front - grid.origin.z) / unit.z;
                    metric.set(u, v, d);
                } else {
                    metric.set(u, v, 50.0);
                }
            }
        }
        let adv = grid.assess(&metric, 1.0);
        assert_eq!(adv.advance_m, 0.0);
        assert!(adv.breach.is_some());
    }

    #[test]
    fn wall_beyond_front_plane_leaves_margin() {
        let (k, pose) = test_camera();
        // Plane wall at z = 2.7: advance = 0.7 within tolerance.
        let cfg = default_cfg();
        let grid = CorridorGrid::new(&k, &pose, cfg.clone());
        let mut metric = DepthMap::filled(320, 256, 0.0);
        for v in 0..256 {
            for u in 0..320 {
                let i = (v * 320 + u) as usize;
                let unit = grid.unit_dirs[i];
                if unit.z > 0.05 {
                    metric.set(u, v, (2.7 - grid.origin.z) / unit.z);
                } else {
                    metric.set(u, v, 60.0);
                }
            }
        }
        let adv = grid.assess(&metric, 1.0).advance_m;
        assert!((adv - 0.7).abs() < 0.05, "advance {adv}");
    }

    #[test]
    fn advance_monotone_in_depth() {
        let (k, pose) = test_camera();
        let cfg = default_cfg();
        let near = DepthMap::filled(320, 256, 2.4);
        let far = DepthMap::filled(320, 256, 3.5);
        let a_near = max_safe_advance(&near, &k, &pose, &cfg, 1.0);
        let a_far = max_safe_advance(&far, &k, &pose, &cfg, 1.0);
        assert!(a_near <= a_far);
        assert!(a_far <= 1.0);
    }

    #[test]
    fn grid_matches_single_pixel_breach() {
        let (k, pose) = test_camera();
        let cfg = default_cfg();
        let grid = CorridorGrid::new(&k, &pose, cfg.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let metric = DepthMap::from_values(
            320,
            256,
            (0..320 * 256).map(|_| rng.gen_range(0.5..8.0)).collect(),
        )
        .unwrap();
        let assessment = grid.assess(&metric, 1.0);
        // Recompute the nearest breach with the single-pixel operation.
        let mut best: Option<(Plane, f64)> = None;
        for v in 0..256u32 {
            for u in 0..320u32 {
                let d = metric.get(u, v);
                let report =
                    corridor_breach(PixelPoint::new(u as f64, v as f64), d, &k, &pose, &cfg);
                if let Some(plane) = report.breach {
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((plane, d));
                    }
                }
            }
        }
        assert_eq!(assessment.breach, best);
        if best.is_some() {
            assert_eq!(assessment.advance_m, 0.0);
        }
    }

    #[test]
    fn config_validation() {
        assert!(default_cfg().validate().is_ok());
        let mut bad = default_cfg();
        bad.y_left = 0.2;
        assert_eq!(bad.validate(), Err(CorridorConfigError::LateralSign));
        let mut bad = default_cfg();
        bad.x_low = bad.x_high;
        assert_eq!(bad.validate(), Err(CorridorConfigError::VerticalOrder));
        let mut bad = default_cfg();
        bad.z_front = 0.0;
        assert_eq!(bad.validate(), Err(CorridorConfigError::FrontNonPositive));
    }
}
