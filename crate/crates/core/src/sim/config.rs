use nalgebra::{Vector2, Vector3};

use crate::arbiter::ArbiterConfig;
use crate::human_branch::HumanSafetyParams;
use crate::planner::ApfParams;
use crate::sentinel::SentinelConfig;
use crate::world::CameraIntrinsics;

/// A depth camera and how it is carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraRig {
    pub intrinsics: CameraIntrinsics,
    /// Offset of the lens from its carrier's origin (forward, left, up). For
    /// the chest camera the vertical component is taken from the wearer's
    /// chest height instead.
    pub mount: Vector3<f64>,
    /// Positive pitches the camera toward the floor.
    pub pitch: f64,
    pub rate_hz: f64,
    pub noise_sigma: f64,
}

impl CameraRig {
    pub fn robot_default() -> Self {
        Self {
            intrinsics: CameraIntrinsics::default(),
            mount: Vector3::new(0.25, 0.0, 0.35),
            pitch: 0.0,
            rate_hz: 10.0,
            noise_sigma: 0.0,
        }
    }

    pub fn chest_default() -> Self {
        Self {
            intrinsics: CameraIntrinsics::default(),
            mount: Vector3::new(0.10, 0.0, 0.0),
            pitch: -15f64.to_radians(),
            rate_hz: 15.0,
            noise_sigma: 0.0,
        }
    }
}

/// Time windows during which the wearer bends forward, pointing the chest
/// camera at `pitch`.
#[derive(Debug, Clone, PartialEq)]
pub struct BendSchedule {
    pub pitch: f64,
    pub windows: Vec<(f64, f64)>,
}

impl BendSchedule {
    pub fn is_bent(&self, time: f64) -> bool {
        self.windows.iter().any(|&(a, b)| time >= a && time <= b)
    }
}

impl Default for BendSchedule {
    fn default() -> Self {
        Self { pitch: 40f64.to_radians(), windows: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostmapParams {
    /// Height band kept by the pass-through filter.
    pub z_min: f64,
    pub z_max: f64,
    /// Grid origin in the robot base frame.
    pub origin: Vector2<f64>,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub r_inf: f64,
}

impl Default for CostmapParams {
    fn default() -> Self {
        Self {
            z_min: 0.02,
            z_max: 0.50,
            origin: Vector2::new(-2.0, -4.0),
            resolution: 0.05,
            width: 160,
            height: 160,
            r_inf: 0.35,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerParams {
    /// Pursuit gain (1/s).
    pub gain: f64,
    pub sway_amplitude: f64,
    pub sway_period: f64,
}

impl Default for FollowerParams {
    fn default() -> Self {
        Self { gain: 3.0, sway_amplitude: 0.08, sway_period: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerParams {
    pub speed: f64,
    /// Maximum heading perturbation (rad).
    pub heading_jitter: f64,
    /// Interval between heading perturbation draws (s).
    pub jitter_interval: f64,
    pub turn_gain: f64,
    pub backoff_time: f64,
    pub backoff_speed: f64,
    pub sidestep_time: f64,
    pub sidestep_speed: f64,
}

impl Default for WalkerParams {
    fn default() -> Self {
        Self {
            speed: 0.4,
            heading_jitter: 6f64.to_radians(),
            jitter_interval: 1.0,
            turn_gain: 2.0,
            backoff_time: 1.0,
            backoff_speed: 0.3,
            sidestep_time: 1.5,
            sidestep_speed: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub dt: f64,
    pub timeout: f64,
    pub goal_tolerance: f64,
    /// Seconds of near-zero planner force away from the goal before giving up.
    pub stall_time: f64,
    pub stall_force: f64,
    /// Seconds of executed standstill (for example a held brake) before giving up.
    pub standstill_time: f64,
    pub robot_radius: f64,
    pub robot_height: f64,
    /// Per-seed uniform displacement bound for every obstacle (m).
    pub obstacle_jitter: f64,
    pub collision_debounce: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.02,
            timeout: 120.0,
            goal_tolerance: 0.2,
            stall_time: 2.0,
            stall_force: 0.05,
            standstill_time: 10.0,
            robot_radius: 0.3,
            robot_height: 0.4,
            obstacle_jitter: 0.0,
            collision_debounce: 1.0,
        }
    }
}

/// Everything an episode needs besides the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub robot_camera: CameraRig,
    pub chest_camera: CameraRig,
    pub bend: BendSchedule,
    pub costmap: CostmapParams,
    pub apf: ApfParams,
    pub planner_rate_hz: f64,
    pub human_safety: HumanSafetyParams,
    pub arbiter: ArbiterConfig,
    pub sentinel: SentinelConfig,
    pub sentinel_enabled: bool,
    pub follower: FollowerParams,
    pub walker: WalkerParams,
    pub sim: SimParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            robot_camera: CameraRig::robot_default(),
            chest_camera: CameraRig::chest_default(),
            bend: BendSchedule::default(),
            costmap: CostmapParams::default(),
            apf: ApfParams::default(),
            planner_rate_hz: 10.0,
            human_safety: HumanSafetyParams::default(),
            arbiter: ArbiterConfig::default(),
            sentinel: SentinelConfig::default(),
            sentinel_enabled: true,
            follower: FollowerParams::default(),
            walker: WalkerParams::default(),
            sim: SimParams::default(),
        }
    }
}

impl SimConfig {
    /// Checks cross-field invariants; returns `(field path, message)`.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let err = |f: &str, m: String| Err((f.to_string(), m));
        let c = &self.costmap;
        if !(c.resolution > 0.0) {
            return err("costmap.resolution_m", format!("must be positive, got {}", c.resolution));
        }
        if c.width == 0 || c.height == 0 {
            return err("costmap.width_cells", "grid must be non-empty".into());
        }
        if !(c.z_min < c.z_max) {
            return err("costmap.z_max_m", "pass-through band is empty".into());
        }
        if c.r_inf < 0.0 {
            return err("costmap.r_inf_m", "must be non-negative".into());
        }
        if let Err((f, m)) = self.apf.validate(c.resolution) {
            return err(&format!("apf.{f}"), m);
        }
        if let Err((f, m)) = self.human_safety.validate() {
            return err(&format!("human_safety.{f}"), m);
        }
        for (name, rig) in [("robot_camera", &self.robot_camera), ("chest_camera", &self.chest_camera)] {
            if let Err(e) = rig.intrinsics.validate() {
                return err(&format!("{name}.intrinsics"), e.to_string());
            }
            if !(rig.rate_hz > 0.0) {
                return err(&format!("{name}.rate_hz"), "must be positive".into());
            }
            if rig.noise_sigma < 0.0 {
                return err(&format!("{name}.noise_sigma_m"), "must be non-negative".into());
            }
        }
        if !(self.planner_rate_hz > 0.0) {
            return err("apf.rate_hz", "must be positive".into());
        }
        let a = &self.arbiter;
        if !(a.epsilon > 0.0) {
            return err("arbiter.epsilon_mps", "must be positive".into());
        }
        if !(a.tick_rate > 0.0) {
            return err("arbiter.tick_rate_hz", "must be positive".into());
        }
        let slowest = 1.0 / self.planner_rate_hz.min(self.chest_camera.rate_hz);
        if !(a.staleness_timeout > slowest) {
            return err(
                "arbiter.staleness_timeout_s",
                format!("must exceed the slowest publish interval {slowest:.3} s"),
            );
        }
        let s = &self.sentinel;
        if !(s.d_crit > 0.0) {
            return err("sentinel.d_crit_m", "must be positive".into());
        }
        if s.debounce < 0.0 {
            return err("sentinel.debounce_s", "must be non-negative".into());
        }
        if let Err(e) = s.roi.check(self.robot_camera.intrinsics.width, self.robot_camera.intrinsics.height) {
            return err("sentinel.roi", e.to_string());
        }
        let p = &self.sim;
        if !(p.dt > 0.0) {
            return err("sim.dt_s", "must be positive".into());
        }
        if !(p.timeout > 0.0) {
            return err("sim.timeout_s", "must be positive".into());
        }
        if p.robot_height > c.z_max {
            return err("sim.robot_height_m", "robot must fit under the pass-through ceiling".into());
        }
        if p.obstacle_jitter < 0.0 {
            return err("sim.obstacle_jitter_m", "must be non-negative".into());
        }
        if !(self.follower.gain > 0.0) {
            return err("follower.gain_per_s", "must be positive".into());
        }
        if self.bend.windows.iter().any(|&(a, b)| !(a <= b)) {
            return err("bend.windows_s", "each window must have start <= end".into());
        }
        Ok(())
    }
}
