//! Chest-camera reactive branch.
//!
//! The wearer's phone inspects its raw cloud for points inside a forward
//! corridor at body height. A hazard inside the safety margin produces an
//! evasive turn, one inside the braking distance a stop; once the corridor
//! is clear again a short timed recovery turn steers back before the branch
//! goes quiet and the planner regains control.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::FrameId;
use crate::perception::PointCloud;
use crate::planner::{CommandSource, VelocityCommand};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardInfo {
    /// Nearest in-corridor point, in the chest camera's physical frame.
    pub nearest_point: Vector3<f64>,
    /// Horizontal forward range to that point.
    pub distance: f64,
    /// Signed lateral offset, positive to the left.
    pub lateral_offset: f64,
    /// Height of the point above the floor.
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanSafetyParams {
    pub corridor_half_width: f64,
    pub z_low: f64,
    pub z_high: f64,
    pub d_safe: f64,
    pub d_brake: f64,
    pub v_evade: f64,
    pub w_evade: f64,
    /// Largest heading change a single evasion may command; past it the
    /// branch keeps driving forward without turning.
    pub max_evade_yaw: f64,
    pub release_hysteresis: f64,
    pub recovery_duration: f64,
}

impl Default for HumanSafetyParams {
    fn default() -> Self {
        Self {
            corridor_half_width: 0.35,
            z_low: 0.30,
            z_high: 1.90,
            d_safe: 1.2,
            d_brake: 0.5,
            v_evade: 0.3,
            w_evade: 0.8,
            max_evade_yaw: 120f64.to_radians(),
            release_hysteresis: 0.2,
            recovery_duration: 1.0,
        }
    }
}

impl HumanSafetyParams {
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(self.d_brake > 0.0 && self.d_brake < self.d_safe) {
            return Err(("d_brake_m", format!("need 0 < d_brake < d_safe, got {} / {}", self.d_brake, self.d_safe)));
        }
        if !(self.z_low < self.z_high) {
            return Err(("z_high_m", "z_low must be below z_high".into()));
        }
        for (name, v) in [
            ("corridor_half_width_m", self.corridor_half_width),
            ("v_evade_mps", self.v_evade),
            ("w_evade_radps", self.w_evade),
            ("max_evade_yaw_deg", self.max_evade_yaw),
        ] {
            if !(v > 0.0) {
                return Err((name, format!("must be positive, got {v}")));
            }
        }
        if self.release_hysteresis < 0.0 || self.recovery_duration < 0.0 {
            return Err(("release_hysteresis_m", "hysteresis and recovery duration must be non-negative".into()));
        }
        Ok(())
    }
}

/// Where the phone sits on the wearer: height of the lens above the floor
/// and its pitch (positive = looking down), as reported by the phone's IMU.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChestMount {
    pub height: f64,
    pub pitch: f64,
}

impl ChestMount {
    /// Gravity-aligned coordinates (x forward, z = height above floor).
    fn level(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.pitch.sin_cos();
        let r = Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c);
        r * p + Vector3::new(0.0, 0.0, self.height)
    }
}

/// Nearest in-corridor point closer than `d_safe`, if any.
pub fn detect_hazard(cloud: &PointCloud, params: &HumanSafetyParams, mount: &ChestMount) -> Result<Option<HazardInfo>> {
    detect_hazard_within(cloud, params, mount, params.d_safe)
}

/// Like [`detect_hazard`] with an explicit forward range.
pub fn detect_hazard_within(
    cloud: &PointCloud,
    params: &HumanSafetyParams,
    mount: &ChestMount,
    range: f64,
) -> Result<Option<HazardInfo>> {
    if cloud.frame != FrameId::PhysicalHuman {
        return Err(Error::FrameMismatch { expected: FrameId::PhysicalHuman, found: cloud.frame });
    }
    let mut best: Option<HazardInfo> = None;
    for p in &cloud.points {
        let q = mount.level(p);
        if q.x <= 0.0 || q.y.abs() > params.corridor_half_width || q.z < params.z_low || q.z > params.z_high {
            continue;
        }
        if best.is_none_or(|b| q.x < b.distance) {
            best = Some(HazardInfo { nearest_point: *p, distance: q.x, lateral_offset: q.y, height: q.z });
        }
    }
    Ok(best.filter(|h| h.distance <= range))
}

/// True for the stop command the branch emits while braking.
///
/// A literal zero command would fall inside the arbiter's deadband, so an
/// active brake carries a lateral component of `2ε` that the executor
/// rounds to a standstill.
pub fn is_brake_marker(cmd: &VelocityCommand, epsilon: f64) -> bool {
    cmd.source == CommandSource::Human
        && cmd.v_x == 0.0
        && cmd.w_z == 0.0
        && cmd.v_y != 0.0
        && cmd.v_y.abs() <= 2.0 * epsilon * (1.0 + 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMode {
    Idle,
    Evading { turn: f64 },
    Braking,
    /// Turning back at `w_z` until `until`.
    Recovering { w_z: f64, until: f64 },
}

/// Reactive command generator with its evasion/recovery memory.
#[derive(Debug, Clone)]
pub struct HumanBranch {
    params: HumanSafetyParams,
    epsilon: f64,
    mode: BranchMode,
    /// Yaw commanded since the current engagement began.
    yaw: f64,
    /// Last published turn rate and its stamp.
    held: Option<(f64, f64)>,
}

impl HumanBranch {
    /// `epsilon` is the arbiter deadband, used to size the brake marker.
    pub fn new(params: HumanSafetyParams, epsilon: f64) -> Self {
        Self { params, epsilon, mode: BranchMode::Idle, yaw: 0.0, held: None }
    }

    pub fn mode(&self) -> BranchMode {
        self.mode
    }

    pub fn params(&self) -> &HumanSafetyParams {
        &self.params
    }

    /// Runs detection on one chest frame and returns the command to publish.
    pub fn process(&mut self, cloud: &PointCloud, mount: &ChestMount, now: f64) -> Result<VelocityCommand> {
        let range = self.params.d_safe + self.params.release_hysteresis;
        let hazard = detect_hazard_within(cloud, &self.params, mount, range)?;
        Ok(self.reactive_command(hazard.as_ref(), now))
    }

    /// Advances the state machine. `hazard` may lie up to
    /// `d_safe + release_hysteresis` away; beyond `d_safe` it only delays
    /// the release of an ongoing evasion.
    ///
    /// While evading, forward speed scales with `distance / d_safe`. The
    /// recovery turn unwinds the yaw accumulated during the evasion over
    /// `recovery_duration`, capped at `w_evade`.
    pub fn reactive_command(&mut self, hazard: Option<&HazardInfo>, now: f64) -> VelocityCommand {
        let p = self.params;
        if let Some((stamp, w)) = self.held.take() {
            self.yaw += w * (now - stamp).max(0.0);
        }
        let engaged = matches!(self.mode, BranchMode::Evading { .. } | BranchMode::Braking);
        match hazard {
            Some(h) if h.distance <= p.d_brake => {
                if !engaged {
                    self.yaw = 0.0;
                }
                self.mode = BranchMode::Braking;
                return VelocityCommand::new(0.0, 2.0 * self.epsilon, 0.0, now, CommandSource::Human);
            }
            Some(h) if h.distance <= p.d_safe || engaged => {
                if !engaged {
                    self.yaw = 0.0;
                }
                // Steer away from the side the obstacle is on; dead ahead counts as left.
                let turn = match self.mode {
                    BranchMode::Evading { turn } => turn,
                    _ if h.lateral_offset >= 0.0 => -1.0,
                    _ => 1.0,
                };
                let w = if self.yaw.abs() < p.max_evade_yaw { turn * p.w_evade } else { 0.0 };
                self.mode = BranchMode::Evading { turn };
                self.held = Some((now, w));
                let v = p.v_evade * (h.distance / p.d_safe).clamp(0.0, 1.0);
                return VelocityCommand::new(v, 0.0, w, now, CommandSource::Human);
            }
            _ => {}
        }
        if engaged {
            let w = (-self.yaw / p.recovery_duration.max(f64::MIN_POSITIVE)).clamp(-p.w_evade, p.w_evade);
            self.mode = if p.recovery_duration > 0.0 && w != 0.0 {
                BranchMode::Recovering { w_z: w, until: now + p.recovery_duration }
            } else {
                BranchMode::Idle
            };
            self.yaw = 0.0;
        }
        if let BranchMode::Recovering { w_z, until } = self.mode {
            if now < until {
                return VelocityCommand::new(p.v_evade, 0.0, w_z, now, CommandSource::Human);
            }
            self.mode = BranchMode::Idle;
        }
        VelocityCommand::zero(CommandSource::Human, now)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: &[(f64, f64, f64)]) -> PointCloud {
        PointCloud::new(points.iter().map(|&(x, y, z)| Vector3::new(x, y, z)).collect(), FrameId::PhysicalHuman, 0.0)
    }

    fn example_params() -> HumanSafetyParams {
        HumanSafetyParams { d_safe: 1.0, corridor_half_width: 0.4, z_low: 0.3, z_high: 1.9, ..Default::default() }
    }

    /// Exhaustive scan: minimum-x point satisfying every corridor predicate.
    fn scan_oracle(c: &PointCloud, p: &HumanSafetyParams) -> Option<(f64, f64)> {
        c.points
            .iter()
            .filter(|q| q.x > 0.0 && q.y.abs() <= p.corridor_half_width && q.z >= p.z_low && q.z <= p.z_high)
            .map(|q| (q.x, q.y))
            .fold(None, |acc: Option<(f64, f64)>, v| match acc {
                Some(a) if a.0 <= v.0 => Some(a),
                _ => Some(v),
            })
            .filter(|v| v.0 <= p.d_safe)
    }

    #[test]
    fn empty_cloud_has_no_hazard() {
        assert!(detect_hazard(&cloud(&[]), &example_params(), &ChestMount::default()).unwrap().is_none());
    }

    #[test]
    fn single_point_in_band() {
        let p = example_params();
        let c = cloud(&[(0.8, 0.1, 1.5)]);
        let h = detect_hazard(&c, &p, &ChestMount::default()).unwrap().unwrap();
        assert_eq!(scan_oracle(&c, &p), Some((0.8, 0.1)));
        assert_eq!((h.distance, h.lateral_offset), (0.8, 0.1));
        let above = cloud(&[(0.8, 0.1, 2.5)]);
        assert!(detect_hazard(&above, &p, &ChestMount::default()).unwrap().is_none());
    }

    #[test]
    fn picks_nearest_among_many() {
        let p = example_params();
        let c = cloud(&[(0.9, 0.0, 1.0), (0.6, 0.5, 1.0), (0.7, -0.2, 1.0), (-0.2, 0.0, 1.0), (0.65, 0.0, 0.1)]);
        let h = detect_hazard(&c, &p, &ChestMount::default()).unwrap().unwrap();
        assert_eq!(Some((h.distance, h.lateral_offset)), scan_oracle(&c, &p));
        assert_eq!(h.distance, 0.7);
    }

    #[test]
    fn mount_levels_the_cloud() {
        // Camera 1.3 m up, pitched 90° down: a point 1.0 m along the camera
        // axis is 0.3 m above the floor, directly below.
        let mount = ChestMount { height: 1.3, pitch: std::f64::consts::FRAC_PI_2 };
        let q = mount.level(&Vector3::new(1.0, 0.0, 0.0));
        assert!((q - Vector3::new(0.0, 0.0, 0.3)).norm() < 1e-12);
    }

    #[test]
    fn rejects_other_frames() {
        let c = PointCloud::empty(FrameId::RobotBase, 0.0);
        assert!(detect_hazard(&c, &example_params(), &ChestMount::default()).is_err());
    }

    fn hazard(distance: f64, lateral: f64) -> HazardInfo {
        HazardInfo { nearest_point: Vector3::new(distance, lateral, 0.0), distance, lateral_offset: lateral, height: 1.6 }
    }

    #[test]
    fn idle_is_exactly_zero() {
        let mut b = HumanBranch::new(HumanSafetyParams::default(), 0.01);
        let c = b.reactive_command(None, 0.0);
        assert_eq!((c.v_x, c.v_y, c.w_z), (0.0, 0.0, 0.0));
        assert_eq!(c.source, CommandSource::Human);
    }

    #[test]
    fn brake_exceeds_deadband() {
        let eps = 0.01;
        let mut b = HumanBranch::new(HumanSafetyParams::default(), eps);
        let c = b.reactive_command(Some(&hazard(0.4, 0.0)), 1.0);
        assert!(c.magnitude(0.5) > eps);
        assert!(is_brake_marker(&c, eps));
        assert_eq!(b.mode(), BranchMode::Braking);
    }

    #[test]
    fn evades_away_from_obstacle_side() {
        let p = HumanSafetyParams::default();
        let mut b = HumanBranch::new(p, 0.01);
        let c = b.reactive_command(Some(&hazard(0.8, 0.1)), 0.0);
        assert!(c.w_z < 0.0);
        assert!(c.v_x > 0.0 && c.v_x < p.v_evade);
        // The turn is latched while evading, so a hazard drifting across
        // the centreline does not flip it.
        let c = b.reactive_command(Some(&hazard(0.8, -0.1)), 0.1);
        assert!(c.w_z < 0.0);
        assert!(!is_brake_marker(&c, 0.01));
        let mut fresh = HumanBranch::new(p, 0.01);
        assert!(fresh.reactive_command(Some(&hazard(0.8, -0.1)), 0.0).w_z > 0.0);
    }

    #[test]
    fn hysteresis_then_timed_recovery() {
        let p = HumanSafetyParams::default();
        let mut b = HumanBranch::new(p, 0.01);
        b.reactive_command(Some(&hazard(1.0, 0.1)), 0.0);
        // Beyond d_safe but inside the hysteresis band: keep evading.
        let c = b.reactive_command(Some(&hazard(1.3, 0.2)), 0.1);
        assert!(c.w_z < 0.0);
        // Clear: recovery turns the other way for the configured duration,
        // unwinding the 0.2 s of evasion at w_evade.
        let c = b.reactive_command(None, 0.2);
        assert!((c.w_z - 0.2 * p.w_evade / p.recovery_duration).abs() < 1e-12);
        assert!(matches!(b.mode(), BranchMode::Recovering { .. }));
        let c = b.reactive_command(None, 1.1);
        assert!(c.w_z > 0.0);
        let c = b.reactive_command(None, 1.2);
        assert_eq!((c.v_x, c.v_y, c.w_z), (0.0, 0.0, 0.0));
        assert_eq!(b.mode(), BranchMode::Idle);
    }

    #[test]
    fn far_hazard_from_idle_is_ignored() {
        let mut b = HumanBranch::new(HumanSafetyParams::default(), 0.01);
        let c = b.reactive_command(Some(&hazard(1.3, 0.0)), 0.0);
        assert_eq!(c.magnitude(0.5), 0.0);
    }
}
