//! Closed-loop episode engine.
//!
//! Every logical task (robot camera + sentinel, planner, chest camera +
//! reactive branch, arbiter, physics) fires at its own fixed rate on an
//! integer-nanosecond timeline. Ties are broken by a fixed task order, so an
//! episode is a pure function of its scene, condition, seed and config.

mod config;
mod kinematics;
mod trace;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{Vector2, Vector3};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{BendSchedule, CameraRig, CostmapParams, FollowerParams, SimConfig, SimParams, WalkerParams};
pub use kinematics::{
    bend_state, detect_collisions, human_follower, integrate_pose, step, BendState, Body, CollisionEvent,
    CollisionTracker, ContactFlags, UnassistedWalker, WorldState,
};
pub use trace::{Trace, TraceError, TraceRow, TRACE_HEADER};

use crate::arbiter::{CommandChannel, Selection};
use crate::error::Error;
use crate::geometry::{compose, invert, optical_to_physical, transform_points, FrameId, RigidTransform, Sensor};
use crate::human_branch::{is_brake_marker, ChestMount, HumanBranch};
use crate::perception::{build_costmap, inflate, passthrough_indices, Costmap2D, PointCloud};
use crate::planner::{admittance_map, apf_force, CommandSource, VelocityCommand};
use crate::sentinel::{
    describe, roi_min_depth, AnnouncementLog, Describer, FrustumObstacle, SceneSummary, Sentinel, TemplateDescriber,
};
use crate::world::{
    add_depth_noise, deproject_labeled, render_depth_labeled, DepthImage, LabelImage, ObstacleKind, Pose2, Scene,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// The person walks alone with a cane-like exploration strategy.
    Unassisted,
    /// Robot-camera navigation only.
    SingleView,
    /// Robot navigation plus the chest-camera override branch.
    CrossView,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Unassisted, Condition::SingleView, Condition::CrossView];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Unassisted => "unassisted",
            Condition::SingleView => "singleview",
            Condition::CrossView => "crossview",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "unassisted" => Ok(Condition::Unassisted),
            "singleview" => Ok(Condition::SingleView),
            "crossview" => Ok(Condition::CrossView),
            _ => Err(format!("unknown condition {s:?} (expected unassisted, singleview or crossview)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Completion {
    Reached(f64),
    Stalled(f64),
    Timeout(f64),
}

impl Completion {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Completion::Reached(t) => Some(t),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Completion::Reached(_) => "reached",
            Completion::Stalled(_) => "stalled",
            Completion::Timeout(_) => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeReport {
    pub condition: Condition,
    pub seed: u64,
    pub completion: Completion,
    pub collisions_total: usize,
    pub collisions_ground: usize,
    pub collisions_overhead: usize,
    /// Robot-body contacts, kept for diagnostics only.
    pub robot_collisions: usize,
    pub announcements: usize,
    pub trace_path: Option<PathBuf>,
}

impl fmt::Display for EpisodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.completion {
            Completion::Reached(t) | Completion::Stalled(t) | Completion::Timeout(t) => t,
        };
        write!(
            f,
            "condition={} seed={} outcome={} time_s={:.2} collisions_total={} collisions_ground={} collisions_overhead={} robot_collisions={} announcements={}",
            self.condition,
            self.seed,
            self.completion.label(),
            t,
            self.collisions_total,
            self.collisions_ground,
            self.collisions_overhead,
            self.robot_collisions,
            self.announcements
        )?;
        if let Some(p) = &self.trace_path {
            write!(f, " trace={}", p.display())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub report: EpisodeReport,
    pub trace: Trace,
    pub announcements: AnnouncementLog,
    pub collisions: Vec<CollisionEvent>,
    /// The scene after per-seed obstacle jitter.
    pub scene: Scene,
}

impl Episode {
    pub fn file_stem(&self) -> String {
        format!("{}_seed{:03}", self.report.condition, self.report.seed)
    }

    /// Writes `<stem>.trace.csv` and `<stem>.announcements.tsv` into `dir`
    /// and records the trace path in the report.
    pub fn write(&mut self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let trace_path = dir.join(format!("{}.trace.csv", self.file_stem()));
        self.trace.write_to(&trace_path)?;
        self.announcements.write_to(&dir.join(format!("{}.announcements.tsv", self.file_stem())))?;
        self.report.trace_path = Some(trace_path.clone());
        Ok(trace_path)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Geometry(#[from] Error),
}

/// Optical-to-world pose of the robot camera.
pub fn robot_camera_pose(robot: &Pose2, rig: &CameraRig) -> RigidTransform {
    let base = RigidTransform::from_planar(robot.x, robot.y, 0.0, robot.theta, FrameId::RobotBase, FrameId::World);
    let base_to_opt = robot_optical_extrinsic(rig);
    compose(&base, &base_to_opt).expect("frames chain by construction")
}

/// `T_R<-O,dog = T_R<-P,dog · T_P<-O,dog`.
pub fn robot_optical_extrinsic(rig: &CameraRig) -> RigidTransform {
    let mount = RigidTransform::from_yaw_pitch(rig.mount, 0.0, rig.pitch, FrameId::PhysicalDog, FrameId::RobotBase);
    compose(&mount, &optical_to_physical(Sensor::Dog)).expect("frames chain by construction")
}

/// Physical-to-world pose of the chest camera for a wearer at `human`.
pub fn chest_physical_pose(human: &Pose2, rig: &CameraRig, chest_height: f64, pitch: f64) -> RigidTransform {
    let (s, c) = human.theta.sin_cos();
    let p = Vector3::new(
        human.x + c * rig.mount.x - s * rig.mount.y,
        human.y + s * rig.mount.x + c * rig.mount.y,
        chest_height,
    );
    RigidTransform::from_yaw_pitch(p, human.theta, pitch, FrameId::PhysicalHuman, FrameId::World)
}

pub fn chest_camera_pose(human: &Pose2, rig: &CameraRig, chest_height: f64, pitch: f64) -> RigidTransform {
    compose(&chest_physical_pose(human, rig, chest_height, pitch), &optical_to_physical(Sensor::Human))
        .expect("frames chain by construction")
}

/// Time-varying `T_R<-O,human(t) = T_R<-P,human(t) · T_P<-O,human`.
pub fn chest_to_robot(robot: &Pose2, human: &Pose2, rig: &CameraRig, chest_height: f64, pitch: f64) -> RigidTransform {
    let world_from_base = RigidTransform::from_planar(robot.x, robot.y, 0.0, robot.theta, FrameId::RobotBase, FrameId::World);
    let base_from_phys = compose(&invert(&world_from_base), &chest_physical_pose(human, rig, chest_height, pitch))
        .expect("frames chain by construction");
    compose(&base_from_phys, &optical_to_physical(Sensor::Human)).expect("frames chain by construction")
}

/// One robot-camera frame pushed through the local mapping pipeline.
#[derive(Debug, Clone)]
pub struct RobotFrame {
    pub image: DepthImage,
    pub labels: LabelImage,
    /// Pass-through-filtered cloud in the robot base frame.
    pub filtered: PointCloud,
    pub filtered_labels: Vec<Option<u16>>,
    pub costmap: Costmap2D,
}

pub fn robot_frame(
    scene: &Scene,
    robot: &Pose2,
    cfg: &SimConfig,
    stamp: f64,
    noise: Option<&mut ChaCha8Rng>,
) -> Result<RobotFrame, Error> {
    let rig = &cfg.robot_camera;
    let (mut image, labels) = render_depth_labeled(scene, &robot_camera_pose(robot, rig).with_stamp(stamp), &rig.intrinsics)?;
    if let Some(rng) = noise {
        add_depth_noise(&mut image, rig.noise_sigma, rng);
    }
    let (optical, point_labels) = deproject_labeled(&image, Some(&labels));
    let base = transform_points(&robot_optical_extrinsic(rig), &optical)?;
    let c = &cfg.costmap;
    let keep = passthrough_indices(&base, c.z_min, c.z_max)?;
    let filtered = PointCloud::new(keep.iter().map(|&i| base.points[i]).collect(), FrameId::RobotBase, stamp);
    let filtered_labels = keep.iter().map(|&i| point_labels[i]).collect();
    let costmap = inflate(&build_costmap(&filtered, c.origin, c.resolution, c.width, c.height)?, c.r_inf);
    Ok(RobotFrame { image, labels, filtered, filtered_labels, costmap })
}

/// Chest-camera cloud in the camera's physical frame, with point labels.
pub fn chest_frame(
    scene: &Scene,
    human: &Pose2,
    cfg: &SimConfig,
    pitch: f64,
    stamp: f64,
    noise: Option<&mut ChaCha8Rng>,
) -> Result<(PointCloud, Vec<Option<u16>>), Error> {
    let rig = &cfg.chest_camera;
    let pose = chest_camera_pose(human, rig, scene.human.chest_height, pitch).with_stamp(stamp);
    let (mut image, labels) = render_depth_labeled(scene, &pose, &rig.intrinsics)?;
    if let Some(rng) = noise {
        add_depth_noise(&mut image, rig.noise_sigma, rng);
    }
    let (optical, l) = deproject_labeled(&image, Some(&labels));
    Ok((transform_points(&optical_to_physical(Sensor::Human), &optical)?, l))
}

/// Obstacles visible in a labeled robot image, each at its nearest pixel.
pub fn frustum_summary(scene: &Scene, image: &DepthImage, labels: &LabelImage) -> SceneSummary {
    let intr = &image.intrinsics;
    let mut best: Vec<Option<(f64, f64)>> = vec![None; scene.obstacles.len()];
    for v in 0..intr.height {
        for u in 0..intr.width {
            let idx = v * intr.width + u;
            let (Some(l), d) = (labels[idx], image.depth[idx]) else { continue };
            if !image.is_valid_depth(d) {
                continue;
            }
            let x = d * (u as f64 - intr.cx) / intr.fx;
            let range = x.hypot(d);
            let slot = &mut best[l as usize];
            if slot.is_none_or(|(r, _)| range < r) {
                *slot = Some((range, (-x).atan2(d)));
            }
        }
    }
    SceneSummary {
        obstacles: best
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                b.map(|(range, bearing)| FrustumObstacle {
                    id: scene.obstacles[i].id.clone(),
                    kind: scene.obstacles[i].kind,
                    bearing_rad: bearing,
                    range_m: range,
                })
            })
            .collect(),
    }
}

/// Applies the per-seed obstacle displacement.
fn jitter_scene(scene: &Scene, bound: f64, rng: &mut ChaCha8Rng) -> Scene {
    let mut out = scene.clone();
    for o in &mut out.obstacles {
        let dx = (rng.random::<f64>() * 2.0 - 1.0) * bound;
        let dy = (rng.random::<f64>() * 2.0 - 1.0) * bound;
        o.footprint = o.footprint.translated(Vector2::new(dx, dy));
    }
    out
}

fn period_due(k: u64, rate_hz: f64) -> u64 {
    (k as f64 * 1e9 / rate_hz).round() as u64
}

/// Fixed-rate task clock on the integer-nanosecond timeline.
#[derive(Debug, Clone, Copy)]
struct TaskClock {
    rate_hz: f64,
    k: u64,
}

impl TaskClock {
    fn new(rate_hz: f64) -> Self {
        Self { rate_hz, k: 0 }
    }

    fn due(&self) -> u64 {
        period_due(self.k, self.rate_hz)
    }

    fn advance(&mut self) {
        self.k += 1;
    }
}

/// Runs one episode with the template describer.
pub fn run_episode(scene: &Scene, condition: Condition, seed: u64, cfg: &SimConfig) -> Result<Episode, SimError> {
    run_episode_with(scene, condition, seed, cfg, &mut TemplateDescriber)
}

pub fn run_episode_with(
    scene: &Scene,
    condition: Condition,
    seed: u64,
    cfg: &SimConfig,
    describer: &mut dyn Describer,
) -> Result<Episode, SimError> {
    cfg.validate().map_err(|(field, message)| SimError::Config { field, message })?;
    scene
        .validate(cfg.costmap.z_max, cfg.sim.robot_radius)
        .map_err(|(field, message)| SimError::Config { field, message })?;

    // Sub-streams are always drawn in the same order, whatever the condition.
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let scene = jitter_scene(scene, cfg.sim.obstacle_jitter, &mut master);
    let sway_phase = master.random::<f64>() * std::f64::consts::TAU;
    let mut robot_noise = ChaCha8Rng::seed_from_u64(master.next_u64());
    let mut chest_noise = ChaCha8Rng::seed_from_u64(master.next_u64());
    let walker_rng = ChaCha8Rng::seed_from_u64(master.next_u64());

    let mut engine = Engine {
        scene: &scene,
        cfg,
        condition,
        state: WorldState::initial(&scene, seed, sway_phase),
        channel: CommandChannel::new(),
        branch: HumanBranch::new(cfg.human_safety, cfg.arbiter.epsilon),
        sentinel: Sentinel::new(),
        walker: UnassistedWalker::new(cfg.walker, walker_rng),
        tracker: CollisionTracker::new(scene.obstacles.len(), cfg.sim.collision_debounce),
        costmap: None,
        apf_prev: VelocityCommand::zero(CommandSource::Apf, 0.0),
        executed: VelocityCommand::zero(CommandSource::Apf, 0.0),
        selection: Selection::Stop,
        a: false,
        min_roi_depth: None,
        stall_since: None,
        still_since: None,
        stalled: false,
        walker_contact: false,
        pending_events: Vec::new(),
        trace: Trace::default(),
        announcements: AnnouncementLog::default(),
        collisions: Vec::new(),
    };
    let completion = engine.run(&mut robot_noise, &mut chest_noise, describer)?;
    let ground = engine.collisions.iter().filter(|c| c.body == Body::Human && c.kind == ObstacleKind::Ground).count();
    let overhead = engine.collisions.iter().filter(|c| c.body == Body::Human && c.kind == ObstacleKind::Overhead).count();
    let robot = engine.collisions.iter().filter(|c| c.body == Body::Robot).count();
    let report = EpisodeReport {
        condition,
        seed,
        completion,
        collisions_total: ground + overhead,
        collisions_ground: ground,
        collisions_overhead: overhead,
        robot_collisions: robot,
        announcements: engine.announcements.len(),
        trace_path: None,
    };
    let Engine { trace, announcements, collisions, .. } = engine;
    Ok(Episode { report, trace, announcements, collisions, scene })
}

struct Engine<'a> {
    scene: &'a Scene,
    cfg: &'a SimConfig,
    condition: Condition,
    state: WorldState,
    channel: CommandChannel,
    branch: HumanBranch,
    sentinel: Sentinel,
    walker: UnassistedWalker,
    tracker: CollisionTracker,
    costmap: Option<Costmap2D>,
    apf_prev: VelocityCommand,
    executed: VelocityCommand,
    selection: Selection,
    a: bool,
    min_roi_depth: Option<f64>,
    stall_since: Option<f64>,
    still_since: Option<f64>,
    stalled: bool,
    walker_contact: bool,
    pending_events: Vec<String>,
    trace: Trace,
    announcements: AnnouncementLog,
    collisions: Vec<CollisionEvent>,
}

impl Engine<'_> {
    fn run(
        &mut self,
        robot_noise: &mut ChaCha8Rng,
        chest_noise: &mut ChaCha8Rng,
        describer: &mut dyn Describer,
    ) -> Result<Completion, SimError> {
        let cfg = self.cfg;
        let assisted = self.condition != Condition::Unassisted;
        let mut robot_cam = TaskClock::new(cfg.robot_camera.rate_hz);
        let mut planner = TaskClock::new(cfg.planner_rate_hz);
        let mut chest_cam = TaskClock::new(cfg.chest_camera.rate_hz);
        let mut arbiter = TaskClock::new(cfg.arbiter.tick_rate);
        let dt = cfg.sim.dt;
        let dt_ns = (dt * 1e9).round() as u64;

        loop {
            let now_ns = self.state.tick * dt_ns;
            if assisted {
                // Everything due up to this physics instant, in task order.
                loop {
                    let next = [robot_cam.due(), planner.due(), chest_cam.due(), arbiter.due()]
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, d)| d <= now_ns)
                        .min_by_key(|&(i, d)| (d, i));
                    let Some((task, due)) = next else { break };
                    let t = due as f64 * 1e-9;
                    match task {
                        0 => {
                            self.robot_camera_task(t, robot_noise, describer)?;
                            robot_cam.advance();
                        }
                        1 => {
                            self.planner_task(t);
                            planner.advance();
                        }
                        2 => {
                            self.chest_task(t, chest_noise)?;
                            chest_cam.advance();
                        }
                        _ => {
                            self.arbiter_task(t);
                            arbiter.advance();
                        }
                    }
                }
            } else {
                self.walker_task();
            }

            self.physics_step();
            self.track_standstill();
            let t = self.state.time;
            let done = if self.goal_reached() {
                Some(Completion::Reached(t))
            } else if self.stalled {
                Some(Completion::Stalled(t))
            } else if t >= cfg.sim.timeout - 1e-9 {
                Some(Completion::Timeout(t))
            } else {
                None
            };
            if let Some(c) = done {
                self.pending_events.push(c.label().to_string());
            }
            self.record_row();
            if let Some(c) = done {
                return Ok(c);
            }
        }
    }

    fn robot_camera_task(&mut self, t: f64, noise: &mut ChaCha8Rng, describer: &mut dyn Describer) -> Result<(), Error> {
        let frame = robot_frame(self.scene, &self.state.robot_pose, self.cfg, t, Some(noise))?;
        if self.cfg.sentinel_enabled {
            self.min_roi_depth = roi_min_depth(&frame.image, &self.cfg.sentinel.roi)?;
            if let Some(trigger) = self.sentinel.observe(self.min_roi_depth, t, &self.cfg.sentinel) {
                let summary = frustum_summary(self.scene, &frame.image, &frame.labels);
                self.announcements.push(describe(&trigger, summary, describer));
                self.pending_events.push("announce".into());
            }
        }
        self.costmap = Some(frame.costmap);
        Ok(())
    }

    fn planner_task(&mut self, t: f64) {
        let robot = self.state.robot_pose;
        let goal_local = robot.to_local(&self.scene.goal);
        let force = match &self.costmap {
            Some(map) => apf_force(&Vector2::zeros(), &goal_local, map, &self.cfg.apf),
            None => crate::planner::attractive_force(&Vector2::zeros(), &goal_local, self.cfg.apf.k_att),
        };
        let cmd = admittance_map(&force, &self.cfg.apf, &self.apf_prev, t);
        self.apf_prev = cmd;
        self.channel.publish(cmd);

        let away = goal_local.norm() > self.cfg.sim.goal_tolerance;
        if away && force.norm() < self.cfg.sim.stall_force {
            let since = *self.stall_since.get_or_insert(t);
            if t - since > self.cfg.sim.stall_time {
                self.stalled = true;
            }
        } else {
            self.stall_since = None;
        }
    }

    fn chest_pitch(&self) -> f64 {
        match self.state.human_bend {
            BendState::Bent => self.cfg.bend.pitch,
            BendState::Upright => self.cfg.chest_camera.pitch,
        }
    }

    fn chest_task(&mut self, t: f64, noise: &mut ChaCha8Rng) -> Result<(), Error> {
        if self.condition != Condition::CrossView {
            return Ok(());
        }
        let pitch = self.chest_pitch();
        let (cloud, _) = chest_frame(self.scene, &self.state.human_pose, self.cfg, pitch, t, Some(noise))?;
        let mount = ChestMount { height: self.scene.human.chest_height, pitch };
        let cmd = self.branch.process(&cloud, &mount, t)?;
        self.channel.publish(cmd);
        Ok(())
    }

    fn arbiter_task(&mut self, t: f64) {
        let d = self.channel.tick(t, &self.cfg.arbiter);
        self.a = d.a;
        self.selection = d.selection;
        self.executed = if is_brake_marker(&d.selected, self.cfg.arbiter.epsilon) {
            VelocityCommand::zero(CommandSource::Human, t)
        } else {
            d.selected
        };
    }

    fn walker_task(&mut self) {
        let t = self.state.time;
        let cmd = self.walker.command(&self.state.human_pose, &self.scene.goal, self.walker_contact, t);
        self.executed = cmd;
        self.a = false;
    }

    fn physics_step(&mut self) {
        let dt = self.cfg.sim.dt;
        let sim = &self.cfg.sim;
        if self.condition == Condition::Unassisted {
            let mut next = self.state.clone();
            next.human_pose = integrate_pose(&self.state.human_pose, &self.executed, dt);
            next.tick += 1;
            next.time = next.tick as f64 * dt;
            next.robot_vel = self.executed;
            self.state = next;
        } else {
            self.state = step(&self.state, &self.executed, dt, self.scene, self.cfg);
        }
        let robot = (self.condition != Condition::Unassisted).then_some(&self.state.robot_pose);
        let flags = detect_collisions(
            Some(&self.state.human_pose),
            robot,
            self.scene,
            &self.scene.human,
            sim.robot_radius,
            sim.robot_height,
        );
        let events = self.tracker.update(&flags, self.scene, self.state.time);
        self.walker_contact = events.iter().any(|e| e.body == Body::Human);
        for e in events {
            let id = &self.scene.obstacles[e.obstacle].id;
            let tag = match (e.body, e.kind) {
                (Body::Human, ObstacleKind::Ground) => format!("hit_ground:{id}"),
                (Body::Human, ObstacleKind::Overhead) => format!("hit_overhead:{id}"),
                (Body::Robot, _) => format!("robot_contact:{id}"),
            };
            self.pending_events.push(tag);
            self.collisions.push(e);
        }
    }

    /// A robot held still by its own commands for `standstill_time` is stuck.
    fn track_standstill(&mut self) {
        if self.condition == Condition::Unassisted {
            return;
        }
        let t = self.state.time;
        let c = &self.executed;
        if c.v_x == 0.0 && c.v_y == 0.0 && c.w_z == 0.0 {
            let since = *self.still_since.get_or_insert(t);
            if t - since >= self.cfg.sim.standstill_time {
                self.stalled = true;
            }
        } else {
            self.still_since = None;
        }
    }

    fn goal_reached(&self) -> bool {
        let agent = match self.condition {
            Condition::Unassisted => &self.state.human_pose,
            _ => &self.state.robot_pose,
        };
        (agent.xy() - self.scene.goal).norm() <= self.cfg.sim.goal_tolerance
    }

    fn record_row(&mut self) {
        let s = &self.state;
        let source = match self.condition {
            Condition::Unassisted => "walker",
            _ => self.selection.as_str(),
        };
        self.trace.rows.push(TraceRow {
            t: s.time,
            robot_x: s.robot_pose.x,
            robot_y: s.robot_pose.y,
            robot_theta: s.robot_pose.theta,
            human_x: s.human_pose.x,
            human_y: s.human_pose.y,
            source: source.to_string(),
            a: self.a,
            v_x: self.executed.v_x,
            v_y: self.executed.v_y,
            w_z: self.executed.w_z,
            min_roi_depth: self.min_roi_depth,
            event: self.pending_events.join(";"),
        });
        self.pending_events.clear();
    }
}

/// Runs every `(condition, seed)` pair, at most `jobs` at a time. Results
/// come back ordered by condition then seed.
pub fn run_batch(
    scene: &Scene,
    conditions: &[Condition],
    seeds: &[u64],
    cfg: &SimConfig,
    jobs: usize,
) -> Result<Vec<Episode>, SimError> {
    let work: Vec<(Condition, u64)> =
        conditions.iter().flat_map(|&c| seeds.iter().map(move |&s| (c, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| work.par_iter().map(|&(c, s)| run_episode(scene, c, s, cfg)).collect())
}

/// What each viewpoint perceives of the overhead obstacles from one pair of
/// robot and wearer poses.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewpointProbe {
    /// Occupied costmap cells containing a filtered point from an overhead obstacle.
    pub robot_overhead_cells: usize,
    /// Occupied costmap cells containing a filtered point from a ground obstacle.
    pub robot_ground_cells: usize,
    /// Raw robot-camera points on overhead obstacles, before filtering.
    pub robot_raw_overhead_points: usize,
    /// Chest-camera points on overhead obstacles.
    pub chest_overhead_points: usize,
    /// Chest-camera points on ground obstacles.
    pub chest_ground_points: usize,
    pub costmap: Costmap2D,
    /// The chest cloud expressed in the robot base frame.
    pub chest_cloud_robot: PointCloud,
}

pub fn probe_viewpoints(scene: &Scene, cfg: &SimConfig, robot: &Pose2, human: &Pose2) -> Result<ViewpointProbe, Error> {
    let frame = robot_frame(scene, robot, cfg, 0.0, None)?;
    let kind_of = |l: Option<u16>| l.map(|i| scene.obstacles[i as usize].kind);
    let count_cells = |kind: ObstacleKind| {
        let mut cells: Vec<(usize, usize)> = frame
            .filtered
            .points
            .iter()
            .zip(&frame.filtered_labels)
            .filter(|(_, l)| kind_of(**l) == Some(kind))
            .filter_map(|(p, _)| frame.costmap.cell_of(&p.xy()))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        cells.len()
    };
    let raw_overhead = frame
        .labels
        .iter()
        .zip(&frame.image.depth)
        .filter(|(l, d)| **d > 0.0 && kind_of(**l) == Some(ObstacleKind::Overhead))
        .count();
    let pitch = cfg.chest_camera.pitch;
    let (chest, chest_labels) = chest_frame(scene, human, cfg, pitch, 0.0, None)?;
    let count_chest = |k: ObstacleKind| chest_labels.iter().filter(|l| kind_of(**l) == Some(k)).count();
    let optical = PointCloud::new(
        chest.points.iter().map(|p| invert(&optical_to_physical(Sensor::Human)).apply(p)).collect(),
        FrameId::OpticalHuman,
        0.0,
    );
    let chest_cloud_robot =
        transform_points(&chest_to_robot(robot, human, &cfg.chest_camera, scene.human.chest_height, pitch), &optical)?;
    Ok(ViewpointProbe {
        robot_overhead_cells: count_cells(ObstacleKind::Overhead),
        robot_ground_cells: count_cells(ObstacleKind::Ground),
        robot_raw_overhead_points: raw_overhead,
        chest_overhead_points: count_chest(ObstacleKind::Overhead),
        chest_ground_points: count_chest(ObstacleKind::Ground),
        costmap: frame.costmap,
        chest_cloud_robot,
    })
}
