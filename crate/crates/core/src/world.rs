//! Obstacle scenes and a ray-casting depth camera.
//!
//! Obstacles are extruded 2D footprints (axis-aligned boxes or vertical
//! cylinders) between `z_min` and `z_max`. Depth images are produced by
//! casting one ray per pixel through a pinhole model and intersecting it
//! analytically with every primitive.

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{FrameId, RigidTransform};
use crate::perception::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Footprint {
    AxisAlignedBox { min: Vector2<f64>, max: Vector2<f64> },
    VerticalCylinder { center: Vector2<f64>, radius: f64 },
}

impl Footprint {
    /// Planar distance from `p` to the footprint (zero inside).
    pub fn distance(&self, p: &Vector2<f64>) -> f64 {
        match *self {
            Footprint::AxisAlignedBox { min, max } => {
                let dx = (min.x - p.x).max(0.0).max(p.x - max.x);
                let dy = (min.y - p.y).max(0.0).max(p.y - max.y);
                dx.hypot(dy)
            }
            Footprint::VerticalCylinder { center, radius } => ((p - center).norm() - radius).max(0.0),
        }
    }

    pub fn centroid(&self) -> Vector2<f64> {
        match *self {
            Footprint::AxisAlignedBox { min, max } => (min + max) * 0.5,
            Footprint::VerticalCylinder { center, .. } => center,
        }
    }

    pub fn translated(&self, d: Vector2<f64>) -> Footprint {
        match *self {
            Footprint::AxisAlignedBox { min, max } => Footprint::AxisAlignedBox { min: min + d, max: max + d },
            Footprint::VerticalCylinder { center, radius } => Footprint::VerticalCylinder { center: center + d, radius },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObstacleKind {
    /// Blocks both the robot and the person.
    Ground,
    /// Hangs above the robot's clearance height; only the person can hit it.
    Overhead,
}

impl ObstacleKind {
    pub fn label(self) -> &'static str {
        match self {
            ObstacleKind::Ground => "ground",
            ObstacleKind::Overhead => "overhead",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub id: String,
    pub footprint: Footprint,
    pub z_min: f64,
    pub z_max: f64,
    pub kind: ObstacleKind,
}

impl Obstacle {
    /// Unsigned distance from a 3D point to the obstacle's surface.
    pub fn surface_distance(&self, p: &Vector3<f64>) -> f64 {
        let planar = self.footprint.distance(&p.xy());
        let dz_out = (self.z_min - p.z).max(0.0).max(p.z - self.z_max);
        if planar > 0.0 || dz_out > 0.0 {
            return planar.hypot(dz_out);
        }
        // Inside: distance to the closest face.
        let to_side = match self.footprint {
            Footprint::AxisAlignedBox { min, max } => (p.x - min.x).min(max.x - p.x).min(p.y - min.y).min(max.y - p.y),
            Footprint::VerticalCylinder { center, radius } => radius - (p.xy() - center).norm(),
        };
        to_side.min(p.z - self.z_min).min(self.z_max - p.z)
    }

    /// Entry parameter of the ray `origin + t * dir` with `t > 0`, if any.
    fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let (mut lo, mut hi) = slab(origin.z, dir.z, self.z_min, self.z_max)?;
        match self.footprint {
            Footprint::AxisAlignedBox { min, max } => {
                let (a, b) = slab(origin.x, dir.x, min.x, max.x)?;
                lo = lo.max(a);
                hi = hi.min(b);
                let (a, b) = slab(origin.y, dir.y, min.y, max.y)?;
                lo = lo.max(a);
                hi = hi.min(b);
            }
            Footprint::VerticalCylinder { center, radius } => {
                let ox = origin.x - center.x;
                let oy = origin.y - center.y;
                let a = dir.x * dir.x + dir.y * dir.y;
                let c = ox * ox + oy * oy - radius * radius;
                if a < 1e-18 {
                    if c > 0.0 {
                        return None;
                    }
                } else {
                    let b = ox * dir.x + oy * dir.y;
                    let disc = b * b - a * c;
                    if disc < 0.0 {
                        return None;
                    }
                    let sq = disc.sqrt();
                    lo = lo.max((-b - sq) / a);
                    hi = hi.min((-b + sq) / a);
                }
            }
        }
        (lo <= hi && lo > 0.0).then_some(lo)
    }
}

/// Parameter interval over which `o + t*d` lies in `[lo, hi]` along one axis.
fn slab(o: f64, d: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if d.abs() < 1e-18 {
        return (lo..=hi).contains(&o).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let t0 = (lo - o) / d;
    let t1 = (hi - o) / d;
    Some(if t0 <= t1 { (t0, t1) } else { (t1, t0) })
}

/// Planar pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn xy(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vector2<f64> {
        Vector2::new(self.theta.cos(), self.theta.sin())
    }

    /// Expresses a world point in this pose's local frame.
    pub fn to_local(&self, p: &Vector2<f64>) -> Vector2<f64> {
        let d = p - self.xy();
        let (s, c) = self.theta.sin_cos();
        Vector2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds2 {
    pub min: Vector2<f64>,
    pub max: Vector2<f64>,
}

impl Bounds2 {
    pub fn contains(&self, p: &Vector2<f64>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanParams {
    pub leash_length: f64,
    pub chest_height: f64,
    pub body_radius: f64,
    pub head_height: f64,
}

impl Default for HumanParams {
    fn default() -> Self {
        Self { leash_length: 0.8, chest_height: 1.30, body_radius: 0.25, head_height: 1.75 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<Obstacle>,
    pub start_robot: Pose2,
    pub goal: Vector2<f64>,
    pub corridor: Bounds2,
    pub human: HumanParams,
}

impl Scene {
    /// Checks the scene invariants. `clearance` is the robot's clearance
    /// height; every overhead obstacle must hang strictly above it.
    pub fn validate(&self, clearance: f64, robot_radius: f64) -> std::result::Result<(), (String, String)> {
        for (i, o) in self.obstacles.iter().enumerate() {
            let field = |f: &str| format!("scene.obstacles[{i}].{f}");
            if !(o.z_min < o.z_max) {
                return Err((field("z_max_m"), format!("z_min {} must be below z_max {}", o.z_min, o.z_max)));
            }
            if o.kind == ObstacleKind::Overhead && o.z_min <= clearance {
                return Err((field("z_min_m"), format!("overhead obstacle must hang above the robot clearance {clearance} m")));
            }
            match o.footprint {
                Footprint::AxisAlignedBox { min, max } if !(min.x < max.x && min.y < max.y) => {
                    return Err((field("max_m"), "box max must exceed min".into()));
                }
                Footprint::VerticalCylinder { radius, .. } if !(radius > 0.0) => {
                    return Err((field("radius_m"), "radius must be positive".into()));
                }
                _ => {}
            }
            if o.footprint.distance(&self.goal) <= 0.0 && o.kind == ObstacleKind::Ground {
                return Err(("scene.goal_m".into(), format!("goal lies inside obstacle {}", o.id)));
            }
            if o.kind == ObstacleKind::Ground && o.footprint.distance(&self.start_robot.xy()) < robot_radius {
                return Err(("scene.start_robot".into(), format!("start pose intersects obstacle {}", o.id)));
            }
        }
        if !self.corridor.contains(&self.goal) {
            return Err(("scene.goal_m".into(), "goal lies outside the corridor bounds".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub max_range: f64,
}

impl CameraIntrinsics {
    /// Square-pixel intrinsics with the principal point at the image center.
    pub fn from_hfov(width: usize, height: usize, hfov: f64, max_range: f64) -> Self {
        let f = (width as f64 / 2.0) / (hfov / 2.0).tan();
        Self { fx: f, fy: f, cx: width as f64 / 2.0, cy: height as f64 / 2.0, width, height, max_range }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidParameter { name: "intrinsics", reason: reason.into() });
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return bad("focal lengths must be positive");
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64 && self.cy >= 0.0 && self.cy < self.height as f64) {
            return bad("principal point must lie inside the image");
        }
        if !(self.max_range > 0.0) {
            return bad("max range must be positive");
        }
        Ok(())
    }

    /// Unnormalized optical ray through pixel `(u, v)`, with unit z.
    pub fn ray(&self, u: usize, v: usize) -> Vector3<f64> {
        Vector3::new((u as f64 - self.cx) / self.fx, (v as f64 - self.cy) / self.fy, 1.0)
    }
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self::from_hfov(160, 120, 60f64.to_radians(), 5.0)
    }
}

/// Row-major depth image in meters; `0.0` marks an invalid pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub intrinsics: CameraIntrinsics,
    pub depth: Vec<f64>,
    pub frame: FrameId,
    pub stamp: f64,
}

impl DepthImage {
    pub fn invalid(intrinsics: CameraIntrinsics, frame: FrameId, stamp: f64) -> Self {
        Self { depth: vec![0.0; intrinsics.width * intrinsics.height], intrinsics, frame, stamp }
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.depth[v * self.intrinsics.width + u]
    }

    pub fn set(&mut self, u: usize, v: usize, d: f64) {
        let w = self.intrinsics.width;
        self.depth[v * w + u] = d;
    }

    pub fn is_valid_depth(&self, d: f64) -> bool {
        d.is_finite() && d > 0.0 && d <= self.intrinsics.max_range
    }

    pub fn valid_count(&self) -> usize {
        self.depth.iter().filter(|&&d| self.is_valid_depth(d)).count()
    }
}

/// Per-pixel index of the obstacle that produced each depth sample.
pub type LabelImage = Vec<Option<u16>>;

/// Renders a depth image of `scene` seen from `camera_pose_world`, which maps
/// the camera's optical frame into the world frame.
pub fn render_depth(scene: &Scene, camera_pose_world: &RigidTransform, intr: &CameraIntrinsics) -> Result<DepthImage> {
    render_depth_labeled(scene, camera_pose_world, intr).map(|(img, _)| img)
}

pub fn render_depth_labeled(
    scene: &Scene,
    camera_pose_world: &RigidTransform,
    intr: &CameraIntrinsics,
) -> Result<(DepthImage, LabelImage)> {
    if camera_pose_world.to_frame() != FrameId::World {
        return Err(Error::FrameMismatch { expected: FrameId::World, found: camera_pose_world.to_frame() });
    }
    let frame = camera_pose_world.from_frame();
    let mut img = DepthImage::invalid(*intr, frame, camera_pose_world.stamp.unwrap_or(0.0));
    let mut labels = vec![None; intr.width * intr.height];
    let origin = *camera_pose_world.translation();
    for v in 0..intr.height {
        for u in 0..intr.width {
            // With unit optical z the ray parameter equals the optical depth.
            let dir = camera_pose_world.apply_vector(&intr.ray(u, v));
            let mut best = intr.max_range;
            let mut hit = None;
            for (i, o) in scene.obstacles.iter().enumerate() {
                if let Some(t) = o.intersect(&origin, &dir) {
                    if t <= best {
                        best = t;
                        hit = Some(i as u16);
                    }
                }
            }
            if hit.is_some() {
                let idx = v * intr.width + u;
                img.depth[idx] = best;
                labels[idx] = hit;
            }
        }
    }
    Ok((img, labels))
}

/// Adds zero-mean Gaussian noise to every valid pixel. Samples that leave
/// `(0, max_range]` become invalid.
pub fn add_depth_noise<R: Rng + ?Sized>(img: &mut DepthImage, sigma: f64, rng: &mut R) {
    if sigma <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    let max = img.intrinsics.max_range;
    for d in img.depth.iter_mut().filter(|d| **d > 0.0) {
        let noisy = *d + normal.sample(rng);
        *d = if noisy > 0.0 && noisy <= max { noisy } else { 0.0 };
    }
}

/// Back-projects every valid pixel into the image's optical frame.
pub fn deproject(img: &DepthImage) -> PointCloud {
    deproject_labeled(img, None).0
}

/// Like [`deproject`], additionally carrying each point's obstacle label.
pub fn deproject_labeled(img: &DepthImage, labels: Option<&LabelImage>) -> (PointCloud, Vec<Option<u16>>) {
    let intr = &img.intrinsics;
    let mut points = Vec::new();
    let mut out_labels = Vec::new();
    for v in 0..intr.height {
        for u in 0..intr.width {
            let idx = v * intr.width + u;
            let d = img.depth[idx];
            if !img.is_valid_depth(d) {
                continue;
            }
            points.push(Vector3::new(d * (u as f64 - intr.cx) / intr.fx, d * (v as f64 - intr.cy) / intr.fy, d));
            out_labels.push(labels.and_then(|l| l[idx]));
        }
    }
    (PointCloud { points, frame: img.frame, stamp: img.stamp }, out_labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compose, optical_to_physical, Sensor};

    fn empty_scene() -> Scene {
        Scene {
            obstacles: vec![],
            start_robot: Pose2::default(),
            goal: Vector2::new(5.0, 0.0),
            corridor: Bounds2 { min: Vector2::new(-1.0, -2.0), max: Vector2::new(10.0, 2.0) },
            human: HumanParams::default(),
        }
    }

    /// Optical->world pose of a level camera at `(x, y, z)` looking along +x.
    fn level_camera(x: f64, y: f64, z: f64, pitch: f64, sensor: Sensor) -> RigidTransform {
        let phys = RigidTransform::from_yaw_pitch(Vector3::new(x, y, z), 0.0, pitch, sensor.physical_frame(), FrameId::World);
        compose(&phys, &optical_to_physical(sensor)).unwrap()
    }

    #[test]
    fn empty_scene_renders_invalid() {
        let intr = CameraIntrinsics::default();
        let img = render_depth(&empty_scene(), &level_camera(0.0, 0.0, 0.35, 0.0, Sensor::Dog), &intr).unwrap();
        assert_eq!(img.valid_count(), 0);
        assert_eq!(img.frame, FrameId::OpticalDog);
        assert!(deproject(&img).points.is_empty());
    }

    #[test]
    fn axial_ray_hits_box_face() {
        let mut scene = empty_scene();
        scene.obstacles.push(Obstacle {
            id: "box".into(),
            footprint: Footprint::AxisAlignedBox { min: Vector2::new(2.0, -0.5), max: Vector2::new(3.0, 0.5) },
            z_min: 0.0,
            z_max: 1.0,
            kind: ObstacleKind::Ground,
        });
        let intr = CameraIntrinsics::default();
        let img = render_depth(&scene, &level_camera(0.0, 0.0, 0.5, 0.0, Sensor::Dog), &intr).unwrap();
        let d = img.get(intr.cx as usize, intr.cy as usize);
        assert!((d - 2.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn overhead_lamp_visible_only_from_chest_height() {
        // Lamp bottom at 1.6 m, 1.0 m ahead of both cameras. The robot camera
        // at 0.35 m sees up to 0.35 + tan(vfov/2) * 1.0 = 0.35 + 60/138.56 ≈ 0.78 m
        // at that range; the chest camera at 1.30 m pitched 15° up sees up to
        // 1.30 + tan(23.4° + 15°) ≈ 2.09 m.
        let mut scene = empty_scene();
        scene.obstacles.push(Obstacle {
            id: "lamp".into(),
            footprint: Footprint::VerticalCylinder { center: Vector2::new(1.2, 0.0), radius: 0.2 },
            z_min: 1.6,
            z_max: 1.8,
            kind: ObstacleKind::Overhead,
        });
        let intr = CameraIntrinsics::default();
        let robot = render_depth(&scene, &level_camera(0.0, 0.0, 0.35, 0.0, Sensor::Dog), &intr).unwrap();
        assert_eq!(robot.valid_count(), 0);
        let chest = render_depth(&scene, &level_camera(0.0, 0.0, 1.30, -15f64.to_radians(), Sensor::Human), &intr).unwrap();
        assert!(chest.valid_count() > 50);
    }

    #[test]
    fn deproject_principal_and_diagonal_rays() {
        let intr = CameraIntrinsics { fx: 100.0, fy: 100.0, cx: 50.0, cy: 40.0, width: 200, height: 80, max_range: 5.0 };
        let mut img = DepthImage::invalid(intr, FrameId::OpticalDog, 0.0);
        img.set(50, 40, 2.0);
        img.set(150, 40, 1.0);
        let cloud = deproject(&img);
        assert_eq!(cloud.points, vec![Vector3::new(0.0, 0.0, 2.0), Vector3::new(1.0, 0.0, 1.0)]);
    }

    #[test]
    fn noise_keeps_depths_in_range() {
        use rand::SeedableRng;
        let intr = CameraIntrinsics::default();
        let mut img = DepthImage::invalid(intr, FrameId::OpticalDog, 0.0);
        img.depth.iter_mut().for_each(|d| *d = 4.99);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        add_depth_noise(&mut img, 0.05, &mut rng);
        assert!(img.depth.iter().all(|&d| d == 0.0 || (d > 0.0 && d <= 5.0)));
        assert!(img.valid_count() > 0 && img.valid_count() < img.depth.len());
    }

    #[test]
    fn footprint_distance() {
        let b = Footprint::AxisAlignedBox { min: Vector2::new(0.0, 0.0), max: Vector2::new(1.0, 1.0) };
        assert_eq!(b.distance(&Vector2::new(0.5, 0.5)), 0.0);
        assert!((b.distance(&Vector2::new(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-12);
        let c = Footprint::VerticalCylinder { center: Vector2::new(0.0, 0.0), radius: 0.5 };
        assert!((c.distance(&Vector2::new(1.0, 0.0)) - 0.5).abs() < 1e-12);
    }
}
