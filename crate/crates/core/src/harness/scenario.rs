//! Scenario files: one TOML document holding the scene and every tunable.
//!
//! Keys carry their unit as a suffix (`_m`, `_s`, `_deg`, `_mps`, `_radps`,
//! `_hz`, `_px`). Every section except `[scene]` is optional and falls back
//! to the built-in defaults; unknown keys are rejected. The grammar is
//! documented in `scenarios/FORMAT.md`.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::arbiter::ArbiterConfig;
use crate::human_branch::HumanSafetyParams;
use crate::planner::ApfParams;
use crate::sentinel::{RoiSpec, SentinelConfig};
use crate::sim::{BendSchedule, CameraRig, CostmapParams, FollowerParams, SimConfig, SimParams, WalkerParams};
use crate::world::{Bounds2, CameraIntrinsics, Footprint, HumanParams, Obstacle, ObstacleKind, Pose2, Scene};

const CANONICAL: &str = include_str!("../../scenarios/canonical.toml");

/// Names accepted by [`load_scenario`] in place of a path.
pub const BUILTIN_SCENARIOS: &[&str] = &["canonical"];

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub scene: Scene,
    pub sim: SimConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{origin}: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: parse error: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: validation error: {field}: {message}")]
    Validation { origin: String, field: String, message: String },
}

impl ScenarioError {
    /// Field path of a validation failure.
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// Loads a built-in scenario by name, or a scenario file by path.
pub fn load_scenario(reference: &str) -> Result<Scenario, ScenarioError> {
    match reference {
        "canonical" => parse_scenario(CANONICAL, "canonical"),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| ScenarioError::Io { origin: path.to_string(), source })?;
            let name = Path::new(path).file_stem().map(|s| s.to_string_lossy().into_owned());
            let mut s = parse_scenario(&text, path)?;
            s.name = name.unwrap_or_else(|| path.to_string());
            Ok(s)
        }
    }
}

/// Parses and validates scenario text. `origin` labels diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
        ScenarioError::Parse { origin: origin.to_string(), line, column, message: e.message().trim().to_string() }
    })?;
    let invalid = |(field, message): (String, String)| ScenarioError::Validation { origin: origin.to_string(), field, message };
    let (scene, sim) = file.resolve().map_err(invalid)?;
    sim.validate().map_err(invalid)?;
    scene.validate(sim.costmap.z_max, sim.sim.robot_radius).map_err(invalid)?;
    Ok(Scenario { name: origin.to_string(), scene, sim })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// The fully resolved configuration, every default spelled out, in the
/// scenario file format.
pub fn effective_config(s: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from_resolved(&s.scene, &s.sim)).expect("scenario serializes")
}

/// Directory the shipped scenario files live in.
pub fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let overhead = self.scene.obstacles.iter().filter(|o| o.kind == ObstacleKind::Overhead).count();
        write!(
            f,
            "{}: {} obstacles ({} ground, {} overhead), goal ({:.2}, {:.2})",
            self.name,
            self.scene.obstacles.len(),
            self.scene.obstacles.len() - overhead,
            overhead,
            self.scene.goal.x,
            self.scene.goal.y
        )
    }
}

type Field = (String, String);

fn bad(field: &str, message: impl Into<String>) -> Field {
    (field.to_string(), message.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scene: SceneDto,
    #[serde(default)]
    robot_camera: CameraDto,
    #[serde(default = "CameraDto::chest")]
    chest_camera: CameraDto,
    #[serde(default)]
    bend: BendDto,
    #[serde(default)]
    costmap: CostmapDto,
    #[serde(default)]
    apf: ApfDto,
    #[serde(default)]
    human_safety: HumanSafetyDto,
    #[serde(default)]
    arbiter: ArbiterDto,
    #[serde(default)]
    sentinel: SentinelDto,
    #[serde(default)]
    follower: FollowerDto,
    #[serde(default)]
    walker: WalkerDto,
    #[serde(default)]
    sim: SimDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDto {
    start: PoseDto,
    goal_m: [f64; 2],
    corridor_min_m: [f64; 2],
    corridor_max_m: [f64; 2],
    #[serde(default)]
    human: HumanDto,
    #[serde(default)]
    obstacles: Vec<ObstacleDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseDto {
    x_m: f64,
    y_m: f64,
    #[serde(default)]
    theta_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HumanDto {
    leash_length_m: f64,
    chest_height_m: f64,
    body_radius_m: f64,
    head_height_m: f64,
}

impl Default for HumanDto {
    fn default() -> Self {
        let h = HumanParams::default();
        Self {
            leash_length_m: h.leash_length,
            chest_height_m: h.chest_height,
            body_radius_m: h.body_radius,
            head_height_m: h.head_height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDto {
    Ground,
    Overhead,
}

/// An obstacle is either a box (`min_m`, `max_m`) or a vertical cylinder
/// (`center_m`, `radius_m`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleDto {
    id: String,
    kind: KindDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius_m: Option<f64>,
    z_min_m: f64,
    z_max_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CameraDto {
    width_px: usize,
    height_px: usize,
    hfov_deg: f64,
    max_range_m: f64,
    /// Lens offset from the carrier (forward, left, up).
    mount_m: [f64; 3],
    /// Positive looks toward the floor.
    pitch_deg: f64,
    rate_hz: f64,
    noise_sigma_m: f64,
}

impl CameraDto {
    fn from_rig(r: &CameraRig) -> Self {
        let i = &r.intrinsics;
        Self {
            width_px: i.width,
            height_px: i.height,
            hfov_deg: degrees(2.0 * (i.width as f64 / 2.0 / i.fx).atan()),
            max_range_m: i.max_range,
            mount_m: [r.mount.x, r.mount.y, r.mount.z],
            pitch_deg: degrees(r.pitch),
            rate_hz: r.rate_hz,
            noise_sigma_m: r.noise_sigma,
        }
    }

    fn chest() -> Self {
        Self::from_rig(&CameraRig::chest_default())
    }

    fn resolve(&self, section: &str) -> Result<CameraRig, Field> {
        if self.width_px == 0 || self.height_px == 0 {
            return Err(bad(&format!("{section}.width_px"), "image must have at least one pixel"));
        }
        if !(self.hfov_deg > 0.0 && self.hfov_deg < 180.0) {
            return Err(bad(&format!("{section}.hfov_deg"), format!("must lie in (0, 180), got {}", self.hfov_deg)));
        }
        Ok(CameraRig {
            intrinsics: CameraIntrinsics::from_hfov(
                self.width_px,
                self.height_px,
                self.hfov_deg.to_radians(),
                self.max_range_m,
            ),
            mount: Vector3::from(self.mount_m),
            pitch: self.pitch_deg.to_radians(),
            rate_hz: self.rate_hz,
            noise_sigma: self.noise_sigma_m,
        })
    }
}

impl Default for CameraDto {
    fn default() -> Self {
        Self::from_rig(&CameraRig::robot_default())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BendDto {
    pitch_deg: f64,
    windows_s: Vec<[f64; 2]>,
}

impl Default for BendDto {
    fn default() -> Self {
        let b = BendSchedule::default();
        Self { pitch_deg: degrees(b.pitch), windows_s: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CostmapDto {
    z_min_m: f64,
    z_max_m: f64,
    origin_m: [f64; 2],
    resolution_m: f64,
    width_cells: usize,
    height_cells: usize,
    r_inf_m: f64,
}

impl Default for CostmapDto {
    fn default() -> Self {
        let c = CostmapParams::default();
        Self {
            z_min_m: c.z_min,
            z_max_m: c.z_max,
            origin_m: [c.origin.x, c.origin.y],
            resolution_m: c.resolution,
            width_cells: c.width,
            height_cells: c.height,
            r_inf_m: c.r_inf,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ApfDto {
    k_att: f64,
    k_rep: f64,
    d0_m: f64,
    v_max_mps: f64,
    w_max_radps: f64,
    admittance_gain: f64,
    yaw_gain: f64,
    smoothing: f64,
    rate_hz: f64,
}

impl Default for ApfDto {
    fn default() -> Self {
        let a = ApfParams::default();
        Self {
            k_att: a.k_att,
            k_rep: a.k_rep,
            d0_m: a.d0,
            v_max_mps: a.v_max,
            w_max_radps: a.w_max,
            admittance_gain: a.admittance_gain,
            yaw_gain: a.yaw_gain,
            smoothing: a.smoothing,
            rate_hz: SimConfig::default().planner_rate_hz,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HumanSafetyDto {
    corridor_half_width_m: f64,
    z_low_m: f64,
    z_high_m: f64,
    d_safe_m: f64,
    d_brake_m: f64,
    v_evade_mps: f64,
    w_evade_radps: f64,
    max_evade_yaw_deg: f64,
    release_hysteresis_m: f64,
    recovery_duration_s: f64,
}

impl Default for HumanSafetyDto {
    fn default() -> Self {
        Self::from(&HumanSafetyParams::default())
    }
}

impl From<&HumanSafetyParams> for HumanSafetyDto {
    fn from(h: &HumanSafetyParams) -> Self {
        Self {
            corridor_half_width_m: h.corridor_half_width,
            z_low_m: h.z_low,
            z_high_m: h.z_high,
            d_safe_m: h.d_safe,
            d_brake_m: h.d_brake,
            v_evade_mps: h.v_evade,
            w_evade_radps: h.w_evade,
            max_evade_yaw_deg: degrees(h.max_evade_yaw),
            release_hysteresis_m: h.release_hysteresis,
            recovery_duration_s: h.recovery_duration,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ArbiterDto {
    epsilon_mps: f64,
    staleness_timeout_s: f64,
    tick_rate_hz: f64,
    l_char_m: f64,
}

impl Default for ArbiterDto {
    fn default() -> Self {
        let a = ArbiterConfig::default();
        Self {
            epsilon_mps: a.epsilon,
            staleness_timeout_s: a.staleness_timeout,
            tick_rate_hz: a.tick_rate,
            l_char_m: a.l_char,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoiDto {
    u_min_px: usize,
    u_max_px: usize,
    v_min_px: usize,
    v_max_px: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SentinelDto {
    enabled: bool,
    d_crit_m: f64,
    debounce_s: f64,
    /// Defaults to the central forward window of the robot image.
    #[serde(skip_serializing_if = "Option::is_none")]
    roi: Option<RoiDto>,
}

impl Default for SentinelDto {
    fn default() -> Self {
        let s = SentinelConfig::default();
        Self { enabled: true, d_crit_m: s.d_crit, debounce_s: s.debounce, roi: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FollowerDto {
    gain_per_s: f64,
    sway_amplitude_m: f64,
    sway_period_s: f64,
}

impl Default for FollowerDto {
    fn default() -> Self {
        let f = FollowerParams::default();
        Self { gain_per_s: f.gain, sway_amplitude_m: f.sway_amplitude, sway_period_s: f.sway_period }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct WalkerDto {
    speed_mps: f64,
    heading_jitter_deg: f64,
    jitter_interval_s: f64,
    turn_gain: f64,
    backoff_time_s: f64,
    backoff_speed_mps: f64,
    sidestep_time_s: f64,
    sidestep_speed_mps: f64,
}

impl Default for WalkerDto {
    fn default() -> Self {
        Self::from(&WalkerParams::default())
    }
}

impl From<&WalkerParams> for WalkerDto {
    fn from(w: &WalkerParams) -> Self {
        Self {
            speed_mps: w.speed,
            heading_jitter_deg: degrees(w.heading_jitter),
            jitter_interval_s: w.jitter_interval,
            turn_gain: w.turn_gain,
            backoff_time_s: w.backoff_time,
            backoff_speed_mps: w.backoff_speed,
            sidestep_time_s: w.sidestep_time,
            sidestep_speed_mps: w.sidestep_speed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimDto {
    dt_s: f64,
    timeout_s: f64,
    goal_tolerance_m: f64,
    stall_time_s: f64,
    stall_force: f64,
    standstill_time_s: f64,
    robot_radius_m: f64,
    robot_height_m: f64,
    obstacle_jitter_m: f64,
    collision_debounce_s: f64,
}

impl Default for SimDto {
    fn default() -> Self {
        Self::from(&SimParams::default())
    }
}

impl From<&SimParams> for SimDto {
    fn from(p: &SimParams) -> Self {
        Self {
            dt_s: p.dt,
            timeout_s: p.timeout,
            goal_tolerance_m: p.goal_tolerance,
            stall_time_s: p.stall_time,
            stall_force: p.stall_force,
            standstill_time_s: p.standstill_time,
            robot_radius_m: p.robot_radius,
            robot_height_m: p.robot_height,
            obstacle_jitter_m: p.obstacle_jitter,
            collision_debounce_s: p.collision_debounce,
        }
    }
}

impl ObstacleDto {
    fn resolve(&self, i: usize) -> Result<Obstacle, Field> {
        let field = |f: &str| format!("scene.obstacles[{i}].{f}");
        let footprint = match (self.min_m, self.max_m, self.center_m, self.radius_m) {
            (Some(min), Some(max), None, None) => {
                Footprint::AxisAlignedBox { min: Vector2::from(min), max: Vector2::from(max) }
            }
            (None, None, Some(c), Some(r)) => Footprint::VerticalCylinder { center: Vector2::from(c), radius: r },
            _ => {
                return Err(bad(
                    &field("shape"),
                    "give either min_m and max_m (box) or center_m and radius_m (cylinder)",
                ))
            }
        };
        if self.id.is_empty() {
            return Err(bad(&field("id"), "must not be empty"));
        }
        Ok(Obstacle {
            id: self.id.clone(),
            footprint,
            z_min: self.z_min_m,
            z_max: self.z_max_m,
            kind: match self.kind {
                KindDto::Ground => ObstacleKind::Ground,
                KindDto::Overhead => ObstacleKind::Overhead,
            },
        })
    }

    fn from_obstacle(o: &Obstacle) -> Self {
        let (min_m, max_m, center_m, radius_m) = match o.footprint {
            Footprint::AxisAlignedBox { min, max } => (Some([min.x, min.y]), Some([max.x, max.y]), None, None),
            Footprint::VerticalCylinder { center, radius } => (None, None, Some([center.x, center.y]), Some(radius)),
        };
        Self {
            id: o.id.clone(),
            kind: match o.kind {
                ObstacleKind::Ground => KindDto::Ground,
                ObstacleKind::Overhead => KindDto::Overhead,
            },
            min_m,
            max_m,
            center_m,
            radius_m,
            z_min_m: o.z_min,
            z_max_m: o.z_max,
        }
    }
}

impl ScenarioFile {
    fn resolve(&self) -> Result<(Scene, SimConfig), Field> {
        let s = &self.scene;
        let mut ids = std::collections::HashSet::new();
        let mut obstacles = Vec::with_capacity(s.obstacles.len());
        for (i, o) in s.obstacles.iter().enumerate() {
            if !ids.insert(o.id.as_str()) {
                return Err(bad(&format!("scene.obstacles[{i}].id"), format!("duplicate id {:?}", o.id)));
            }
            obstacles.push(o.resolve(i)?);
        }
        let h = &s.human;
        let human = HumanParams {
            leash_length: h.leash_length_m,
            chest_height: h.chest_height_m,
            body_radius: h.body_radius_m,
            head_height: h.head_height_m,
        };
        if !(human.leash_length > 0.0) {
            return Err(bad("scene.human.leash_length_m", "must be positive"));
        }
        if !(human.body_radius > 0.0) {
            return Err(bad("scene.human.body_radius_m", "must be positive"));
        }
        if !(human.chest_height > 0.0 && human.chest_height < human.head_height) {
            return Err(bad("scene.human.chest_height_m", "must lie between the floor and the head height"));
        }
        let corridor = Bounds2 { min: Vector2::from(s.corridor_min_m), max: Vector2::from(s.corridor_max_m) };
        if !(corridor.min.x < corridor.max.x && corridor.min.y < corridor.max.y) {
            return Err(bad("scene.corridor_max_m", "corridor max must exceed min"));
        }
        let scene = Scene {
            obstacles,
            start_robot: Pose2::new(s.start.x_m, s.start.y_m, s.start.theta_deg.to_radians()),
            goal: Vector2::from(s.goal_m),
            corridor,
            human,
        };

        let robot_camera = self.robot_camera.resolve("robot_camera")?;
        let chest_camera = self.chest_camera.resolve("chest_camera")?;
        let c = &self.costmap;
        let a = &self.apf;
        let hs = &self.human_safety;
        let ar = &self.arbiter;
        let se = &self.sentinel;
        let w = &self.walker;
        let p = &self.sim;
        let roi = match &se.roi {
            Some(r) => RoiSpec { u_min: r.u_min_px, u_max: r.u_max_px, v_min: r.v_min_px, v_max: r.v_max_px },
            None => RoiSpec::default_for(robot_camera.intrinsics.width, robot_camera.intrinsics.height),
        };
        let sim = SimConfig {
            robot_camera,
            chest_camera,
            bend: BendSchedule {
                pitch: self.bend.pitch_deg.to_radians(),
                windows: self.bend.windows_s.iter().map(|w| (w[0], w[1])).collect(),
            },
            costmap: CostmapParams {
                z_min: c.z_min_m,
                z_max: c.z_max_m,
                origin: Vector2::from(c.origin_m),
                resolution: c.resolution_m,
                width: c.width_cells,
                height: c.height_cells,
                r_inf: c.r_inf_m,
            },
            apf: ApfParams {
                k_att: a.k_att,
                k_rep: a.k_rep,
                d0: a.d0_m,
                v_max: a.v_max_mps,
                w_max: a.w_max_radps,
                admittance_gain: a.admittance_gain,
                yaw_gain: a.yaw_gain,
                smoothing: a.smoothing,
            },
            planner_rate_hz: a.rate_hz,
            human_safety: HumanSafetyParams {
                corridor_half_width: hs.corridor_half_width_m,
                z_low: hs.z_low_m,
                z_high: hs.z_high_m,
                d_safe: hs.d_safe_m,
                d_brake: hs.d_brake_m,
                v_evade: hs.v_evade_mps,
                w_evade: hs.w_evade_radps,
                max_evade_yaw: hs.max_evade_yaw_deg.to_radians(),
                release_hysteresis: hs.release_hysteresis_m,
                recovery_duration: hs.recovery_duration_s,
            },
            arbiter: ArbiterConfig {
                epsilon: ar.epsilon_mps,
                staleness_timeout: ar.staleness_timeout_s,
                tick_rate: ar.tick_rate_hz,
                l_char: ar.l_char_m,
            },
            sentinel: SentinelConfig { d_crit: se.d_crit_m, debounce: se.debounce_s, roi },
            sentinel_enabled: se.enabled,
            follower: FollowerParams {
                gain: self.follower.gain_per_s,
                sway_amplitude: self.follower.sway_amplitude_m,
                sway_period: self.follower.sway_period_s,
            },
            walker: WalkerParams {
                speed: w.speed_mps,
                heading_jitter: w.heading_jitter_deg.to_radians(),
                jitter_interval: w.jitter_interval_s,
                turn_gain: w.turn_gain,
                backoff_time: w.backoff_time_s,
                backoff_speed: w.backoff_speed_mps,
                sidestep_time: w.sidestep_time_s,
                sidestep_speed: w.sidestep_speed_mps,
            },
            sim: SimParams {
                dt: p.dt_s,
                timeout: p.timeout_s,
                goal_tolerance: p.goal_tolerance_m,
                stall_time: p.stall_time_s,
                stall_force: p.stall_force,
                standstill_time: p.standstill_time_s,
                robot_radius: p.robot_radius_m,
                robot_height: p.robot_height_m,
                obstacle_jitter: p.obstacle_jitter_m,
                collision_debounce: p.collision_debounce_s,
            },
        };
        Ok((scene, sim))
    }

    fn from_resolved(scene: &Scene, sim: &SimConfig) -> Self {
        let h = &scene.human;
        let c = &sim.costmap;
        let a = &sim.apf;
        let ar = &sim.arbiter;
        let roi = &sim.sentinel.roi;
        Self {
            scene: SceneDto {
                start: PoseDto {
                    x_m: scene.start_robot.x,
                    y_m: scene.start_robot.y,
                    theta_deg: degrees(scene.start_robot.theta),
                },
                goal_m: [scene.goal.x, scene.goal.y],
                corridor_min_m: [scene.corridor.min.x, scene.corridor.min.y],
                corridor_max_m: [scene.corridor.max.x, scene.corridor.max.y],
                human: HumanDto {
                    leash_length_m: h.leash_length,
                    chest_height_m: h.chest_height,
                    body_radius_m: h.body_radius,
                    head_height_m: h.head_height,
                },
                obstacles: scene.obstacles.iter().map(ObstacleDto::from_obstacle).collect(),
            },
            robot_camera: CameraDto::from_rig(&sim.robot_camera),
            chest_camera: CameraDto::from_rig(&sim.chest_camera),
            bend: BendDto {
                pitch_deg: degrees(sim.bend.pitch),
                windows_s: sim.bend.windows.iter().map(|&(a, b)| [a, b]).collect(),
            },
            costmap: CostmapDto {
                z_min_m: c.z_min,
                z_max_m: c.z_max,
                origin_m: [c.origin.x, c.origin.y],
                resolution_m: c.resolution,
                width_cells: c.width,
                height_cells: c.height,
                r_inf_m: c.r_inf,
            },
            apf: ApfDto {
                k_att: a.k_att,
                k_rep: a.k_rep,
                d0_m: a.d0,
                v_max_mps: a.v_max,
                w_max_radps: a.w_max,
                admittance_gain: a.admittance_gain,
                yaw_gain: a.yaw_gain,
                smoothing: a.smoothing,
                rate_hz: sim.planner_rate_hz,
            },
            human_safety: HumanSafetyDto::from(&sim.human_safety),
            arbiter: ArbiterDto {
                epsilon_mps: ar.epsilon,
                staleness_timeout_s: ar.staleness_timeout,
                tick_rate_hz: ar.tick_rate,
                l_char_m: ar.l_char,
            },
            sentinel: SentinelDto {
                enabled: sim.sentinel_enabled,
                d_crit_m: sim.sentinel.d_crit,
                debounce_s: sim.sentinel.debounce,
                roi: Some(RoiDto { u_min_px: roi.u_min, u_max_px: roi.u_max, v_min_px: roi.v_min, v_max_px: roi.v_max }),
            },
            follower: FollowerDto {
                gain_per_s: sim.follower.gain,
                sway_amplitude_m: sim.follower.sway_amplitude,
                sway_period_s: sim.follower.sway_period,
            },
            walker: WalkerDto::from(&sim.walker),
            sim: SimDto::from(&sim.sim),
        }
    }
}

/// Radians to degrees, rounded to 9 decimals so that values read from a
/// file print back the way they were written.
fn degrees(rad: f64) -> f64 {
    (rad.to_degrees() * 1e9).round() / 1e9
}
