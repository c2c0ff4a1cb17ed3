use nalgebra::Vector2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::planner::{CommandSource, VelocityCommand};
use crate::world::{HumanParams, ObstacleKind, Pose2, Scene};

use super::config::{BendSchedule, FollowerParams, SimConfig, WalkerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BendState {
    Upright,
    Bent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub time: f64,
    /// Physics ticks taken so far; `time == tick * dt`.
    pub tick: u64,
    pub robot_pose: Pose2,
    pub robot_vel: VelocityCommand,
    pub human_pose: Pose2,
    pub human_bend: BendState,
    pub rng_seed: u64,
    /// Phase of the wearer's lateral sway, drawn once per episode.
    pub sway_phase: f64,
}

impl WorldState {
    pub fn initial(scene: &Scene, seed: u64, sway_phase: f64) -> Self {
        let r = scene.start_robot;
        let back = r.heading() * scene.human.leash_length;
        Self {
            time: 0.0,
            tick: 0,
            robot_pose: r,
            robot_vel: VelocityCommand::zero(CommandSource::Apf, 0.0),
            human_pose: Pose2::new(r.x - back.x, r.y - back.y, r.theta),
            human_bend: BendState::Upright,
            rng_seed: seed,
            sway_phase,
        }
    }
}

/// Explicit Euler integration of a body-frame command.
pub fn integrate_pose(pose: &Pose2, cmd: &VelocityCommand, dt: f64) -> Pose2 {
    let (s, c) = pose.theta.sin_cos();
    Pose2 {
        x: pose.x + (cmd.v_x * c - cmd.v_y * s) * dt,
        y: pose.y + (cmd.v_x * s + cmd.v_y * c) * dt,
        theta: pose.theta + cmd.w_z * dt,
    }
}

/// First-order pursuit of the leash end: the point one leash length from
/// the robot along the robot-to-wearer line (a towed hitch), displaced
/// sideways by the wearer's sway. The wearer faces the robot.
pub fn human_follower(
    human: &Pose2,
    robot: &Pose2,
    leash: f64,
    params: &FollowerParams,
    sway_phase: f64,
    time: f64,
    dt: f64,
) -> Pose2 {
    let heading = robot.heading();
    let left = Vector2::new(-heading.y, heading.x);
    let sway = if params.sway_period > 0.0 {
        params.sway_amplitude * (std::f64::consts::TAU * time / params.sway_period + sway_phase).sin()
    } else {
        0.0
    };
    let back = human.xy() - robot.xy();
    let back = if back.norm() > 1e-9 { back.normalize() } else { -heading };
    let target = robot.xy() + back * leash + left * sway;
    let p = human.xy() + (target - human.xy()) * (params.gain * dt);
    let to_robot = robot.xy() - p;
    let theta = if to_robot.norm() > 1e-9 { to_robot.y.atan2(to_robot.x) } else { human.theta };
    Pose2::new(p.x, p.y, theta)
}

pub fn bend_state(schedule: &BendSchedule, time: f64) -> BendState {
    if schedule.is_bent(time) {
        BendState::Bent
    } else {
        BendState::Upright
    }
}

/// Advances the world by `dt` under the executed command `v_cmd`.
pub fn step(state: &WorldState, v_cmd: &VelocityCommand, dt: f64, scene: &Scene, cfg: &SimConfig) -> WorldState {
    let robot_pose = integrate_pose(&state.robot_pose, v_cmd, dt);
    let tick = state.tick + 1;
    let time = tick as f64 * dt;
    let human_pose = human_follower(
        &state.human_pose,
        &robot_pose,
        scene.human.leash_length,
        &cfg.follower,
        state.sway_phase,
        time,
        dt,
    );
    WorldState {
        time,
        tick,
        robot_pose,
        robot_vel: *v_cmd,
        human_pose,
        human_bend: bend_state(&cfg.bend, time),
        ..state.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Body {
    Human,
    Robot,
}

/// Current overlap of each body with each obstacle, indexed like `scene.obstacles`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactFlags {
    pub human: Vec<bool>,
    pub robot: Vec<bool>,
}

/// The person is a vertical cylinder from the floor to head height; the
/// robot a cylinder of `robot_radius` up to `robot_height`. A body touches
/// an obstacle when the height spans intersect and the planar distance to
/// the footprint is below the body radius.
pub fn detect_collisions(
    human: Option<&Pose2>,
    robot: Option<&Pose2>,
    scene: &Scene,
    hp: &HumanParams,
    robot_radius: f64,
    robot_height: f64,
) -> ContactFlags {
    let touch = |pose: Option<&Pose2>, radius: f64, top: f64| -> Vec<bool> {
        scene
            .obstacles
            .iter()
            .map(|o| match pose {
                Some(p) => o.z_min < top && o.z_max > 0.0 && o.footprint.distance(&p.xy()) < radius,
                None => false,
            })
            .collect()
    };
    ContactFlags {
        human: touch(human, hp.body_radius, hp.head_height),
        robot: touch(robot, robot_radius, robot_height),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    pub body: Body,
    pub obstacle: usize,
    pub kind: ObstacleKind,
}

#[derive(Debug, Clone, Copy, Default)]
struct ContactMemory {
    touching: bool,
    last_touch: Option<f64>,
}

/// Turns per-tick overlap flags into debounced collision events.
#[derive(Debug, Clone)]
pub struct CollisionTracker {
    debounce: f64,
    human: Vec<ContactMemory>,
    robot: Vec<ContactMemory>,
}

impl CollisionTracker {
    pub fn new(n_obstacles: usize, debounce: f64) -> Self {
        Self { debounce, human: vec![ContactMemory::default(); n_obstacles], robot: vec![ContactMemory::default(); n_obstacles] }
    }

    pub fn update(&mut self, flags: &ContactFlags, scene: &Scene, time: f64) -> Vec<CollisionEvent> {
        let mut out = Vec::new();
        for (body, mem, now) in [(Body::Human, &mut self.human, &flags.human), (Body::Robot, &mut self.robot, &flags.robot)] {
            for (i, (m, &touching)) in mem.iter_mut().zip(now).enumerate() {
                if touching && !m.touching && m.last_touch.is_none_or(|t| time - t > self.debounce) {
                    out.push(CollisionEvent { time, body, obstacle: i, kind: scene.obstacles[i].kind });
                }
                if touching {
                    m.last_touch = Some(time);
                }
                m.touching = touching;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum WalkerPhase {
    Walking,
    BackingOff { until: f64 },
    Sidestepping { until: f64, dir: f64 },
}

/// Cane-exploration surrogate for the unassisted condition: walk toward the
/// goal with a jittered heading, and after touching something back off and
/// sidestep in a random direction. It never reads sensor data.
#[derive(Debug, Clone)]
pub struct UnassistedWalker {
    params: WalkerParams,
    rng: ChaCha8Rng,
    phase: WalkerPhase,
    jitter: f64,
    next_jitter: f64,
}

impl UnassistedWalker {
    pub fn new(params: WalkerParams, rng: ChaCha8Rng) -> Self {
        Self { params, rng, phase: WalkerPhase::Walking, jitter: 0.0, next_jitter: 0.0 }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>() * 2.0 - 1.0
    }

    /// `contact` is true on ticks where the walker started touching an obstacle.
    pub fn command(&mut self, pose: &Pose2, goal: &Vector2<f64>, contact: bool, time: f64) -> VelocityCommand {
        let p = self.params;
        if contact && matches!(self.phase, WalkerPhase::Walking | WalkerPhase::Sidestepping { .. }) {
            self.phase = WalkerPhase::BackingOff { until: time + p.backoff_time };
        }
        match self.phase {
            WalkerPhase::BackingOff { until } if time < until => {
                return VelocityCommand::new(-p.backoff_speed, 0.0, 0.0, time, CommandSource::Human);
            }
            WalkerPhase::BackingOff { .. } => {
                let dir = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
                self.phase = WalkerPhase::Sidestepping { until: time + p.sidestep_time, dir };
            }
            _ => {}
        }
        if let WalkerPhase::Sidestepping { until, dir } = self.phase {
            if time < until {
                return VelocityCommand::new(0.0, dir * p.sidestep_speed, 0.0, time, CommandSource::Human);
            }
            self.phase = WalkerPhase::Walking;
        }
        if time >= self.next_jitter {
            self.jitter = self.uniform() * p.heading_jitter;
            self.next_jitter = time + p.jitter_interval;
        }
        let to_goal = goal - pose.xy();
        let desired = to_goal.y.atan2(to_goal.x) + self.jitter;
        let err = (desired - pose.theta).sin().atan2((desired - pose.theta).cos());
        let speed = p.speed.min(to_goal.norm());
        VelocityCommand::new(speed * err.cos().max(0.0), 0.0, p.turn_gain * err, time, CommandSource::Human)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Bounds2, Footprint, Obstacle};
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn scene(obstacles: Vec<Obstacle>) -> Scene {
        Scene {
            obstacles,
            start_robot: Pose2::default(),
            goal: Vector2::new(10.0, 0.0),
            corridor: Bounds2 { min: Vector2::new(-2.0, -2.0), max: Vector2::new(12.0, 2.0) },
            human: HumanParams::default(),
        }
    }

    fn lamp() -> Obstacle {
        Obstacle {
            id: "lamp".into(),
            footprint: Footprint::VerticalCylinder { center: Vector2::new(3.0, 0.0), radius: 0.2 },
            z_min: 1.6,
            z_max: 1.8,
            kind: ObstacleKind::Overhead,
        }
    }

    #[test]
    fn integration_examples() {
        let z = Pose2::default();
        let still = integrate_pose(&z, &VelocityCommand::zero(CommandSource::Apf, 0.0), 0.1);
        assert_eq!(still, z);
        let fwd = integrate_pose(&z, &VelocityCommand::new(1.0, 0.0, 0.0, 0.0, CommandSource::Apf), 0.1);
        assert!((fwd.x - 0.1).abs() < 1e-15 && fwd.y == 0.0);
        let turn = integrate_pose(&z, &VelocityCommand::new(0.0, 0.0, PI, 0.0, CommandSource::Apf), 0.5);
        assert!((turn.theta - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn step_advances_time_only_for_zero_command() {
        let s = scene(vec![]);
        let cfg = SimConfig::default();
        let st = WorldState::initial(&s, 1, 0.0);
        let cfg = SimConfig { follower: FollowerParams { sway_amplitude: 0.0, ..cfg.follower }, ..cfg };
        let next = step(&st, &VelocityCommand::zero(CommandSource::Apf, 0.0), 0.02, &s, &cfg);
        assert_eq!(next.robot_pose, st.robot_pose);
        assert_eq!(next.human_pose.xy(), st.human_pose.xy());
        assert!((next.time - 0.02).abs() < 1e-15);
    }

    #[test]
    fn follower_fixed_point_and_monotone_approach() {
        let robot = Pose2::new(2.0, 0.0, 0.0);
        let fp = FollowerParams { gain: 3.0, sway_amplitude: 0.0, sway_period: 4.0 };
        let at_target = Pose2::new(1.0, 0.0, 0.0);
        let next = human_follower(&at_target, &robot, 1.0, &fp, 0.0, 0.0, 0.02);
        assert_eq!(next.xy(), at_target.xy());
        let mut h = Pose2::new(-1.0, 0.7, 0.0);
        let mut last = f64::INFINITY;
        for k in 0..200 {
            h = human_follower(&h, &robot, 1.0, &fp, 0.0, k as f64 * 0.02, 0.02);
            let d = (h.xy() - Vector2::new(1.0, 0.0)).norm();
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn bend_window() {
        let sched = BendSchedule { pitch: 0.7, windows: vec![(3.0, 5.0)] };
        assert_eq!(bend_state(&sched, 2.99), BendState::Upright);
        assert_eq!(bend_state(&sched, 3.0), BendState::Bent);
        assert_eq!(bend_state(&sched, 4.5), BendState::Bent);
        assert_eq!(bend_state(&sched, 5.01), BendState::Upright);
    }

    #[test]
    fn collisions_by_height() {
        let s = scene(vec![lamp()]);
        let hp = HumanParams::default();
        let far = Pose2::new(0.0, 0.0, 0.0);
        let under = Pose2::new(3.1, 0.0, 0.0);
        let f = detect_collisions(Some(&far), Some(&far), &s, &hp, 0.3, 0.4);
        assert_eq!(f.human, vec![false]);
        let f = detect_collisions(Some(&under), Some(&under), &s, &hp, 0.3, 0.4);
        assert_eq!(f.human, vec![true]);
        assert_eq!(f.robot, vec![false]);
    }

    #[test]
    fn tracker_debounces_recontact() {
        let s = scene(vec![lamp()]);
        let mut t = CollisionTracker::new(1, 1.0);
        let on = ContactFlags { human: vec![true], robot: vec![false] };
        let off = ContactFlags { human: vec![false], robot: vec![false] };
        assert_eq!(t.update(&on, &s, 0.0).len(), 1);
        assert_eq!(t.update(&on, &s, 0.1).len(), 0);
        assert_eq!(t.update(&off, &s, 0.2).len(), 0);
        assert_eq!(t.update(&on, &s, 0.8).len(), 0);
        assert_eq!(t.update(&off, &s, 0.9).len(), 0);
        let ev = t.update(&on, &s, 2.0);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, ObstacleKind::Overhead);
    }

    #[test]
    fn walker_backs_off_then_sidesteps() {
        let mut w = UnassistedWalker::new(WalkerParams::default(), ChaCha8Rng::seed_from_u64(1));
        let pose = Pose2::default();
        let goal = Vector2::new(5.0, 0.0);
        let c = w.command(&pose, &goal, false, 0.0);
        assert!(c.v_x > 0.0);
        let c = w.command(&pose, &goal, true, 1.0);
        assert!(c.v_x < 0.0);
        let p = WalkerParams::default();
        let c = w.command(&pose, &goal, false, 1.0 + p.backoff_time);
        assert!(c.v_y != 0.0 && c.v_x == 0.0);
        let c = w.command(&pose, &goal, false, 1.0 + p.backoff_time * 2.0 + p.sidestep_time);
        assert!(c.v_x > 0.0);
    }
}
