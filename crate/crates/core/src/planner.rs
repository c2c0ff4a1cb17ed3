//! Artificial potential field navigation over the inflated local costmap.
//!
//! The attractive potential is quadratic, `U_att = ½·k_att·|p − goal|²`,
//! and every non-free cell within `d0` contributes a Khatib-style repulsive
//! term `U_rep = ½·k_rep·(1/d − 1/d0)²`. The commanded force is the negative
//! gradient of their sum, which an admittance law turns into a velocity.

use nalgebra::Vector2;

use crate::perception::Costmap2D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApfParams {
    pub k_att: f64,
    pub k_rep: f64,
    /// Repulsive influence radius (m).
    pub d0: f64,
    pub v_max: f64,
    pub w_max: f64,
    /// (m/s) per unit force along the heading.
    pub admittance_gain: f64,
    /// rad/s per radian of force bearing.
    pub yaw_gain: f64,
    /// First-order smoothing factor in (0, 1].
    pub smoothing: f64,
}

impl Default for ApfParams {
    fn default() -> Self {
        Self {
            k_att: 1.0,
            k_rep: 0.15,
            d0: 1.0,
            v_max: 0.6,
            w_max: 1.2,
            admittance_gain: 0.5,
            yaw_gain: 1.5,
            smoothing: 0.3,
        }
    }
}

impl ApfParams {
    pub fn validate(&self, resolution: f64) -> Result<(), (&'static str, String)> {
        let positive = [
            ("k_att", self.k_att),
            ("k_rep", self.k_rep),
            ("d0_m", self.d0),
            ("v_max_mps", self.v_max),
            ("w_max_radps", self.w_max),
            ("admittance_gain", self.admittance_gain),
            ("yaw_gain", self.yaw_gain),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err((name, format!("must be strictly positive, got {v}")));
            }
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return Err(("smoothing", format!("must lie in (0, 1], got {}", self.smoothing)));
        }
        if self.d0 <= resolution {
            return Err(("d0_m", format!("must exceed the costmap resolution {resolution}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceVector {
    pub fx: f64,
    pub fy: f64,
}

impl ForceVector {
    pub fn new(fx: f64, fy: f64) -> Self {
        Self { fx, fy }
    }

    pub fn norm(&self) -> f64 {
        self.fx.hypot(self.fy)
    }
}

impl std::ops::Add for ForceVector {
    type Output = ForceVector;

    fn add(self, o: ForceVector) -> ForceVector {
        ForceVector::new(self.fx + o.fx, self.fy + o.fy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandSource {
    Apf,
    Human,
}

impl CommandSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandSource::Apf => "apf",
            CommandSource::Human => "human",
        }
    }
}

/// Body-frame velocity: forward, leftward and yaw rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCommand {
    pub v_x: f64,
    pub v_y: f64,
    pub w_z: f64,
    pub stamp: f64,
    pub source: CommandSource,
}

impl VelocityCommand {
    pub fn zero(source: CommandSource, stamp: f64) -> Self {
        Self { v_x: 0.0, v_y: 0.0, w_z: 0.0, stamp, source }
    }

    pub fn new(v_x: f64, v_y: f64, w_z: f64, stamp: f64, source: CommandSource) -> Self {
        Self { v_x, v_y, w_z, stamp, source }
    }

    /// Euclidean norm of `(v_x, v_y, l_char·w_z)`.
    pub fn magnitude(&self, l_char: f64) -> f64 {
        (self.v_x * self.v_x + self.v_y * self.v_y + (l_char * self.w_z).powi(2)).sqrt()
    }

    pub fn same_motion(&self, other: &VelocityCommand) -> bool {
        self.v_x == other.v_x && self.v_y == other.v_y && self.w_z == other.w_z
    }
}

pub fn attractive_potential(robot: &Vector2<f64>, goal: &Vector2<f64>, k_att: f64) -> f64 {
    0.5 * k_att * (robot - goal).norm_squared()
}

pub fn attractive_force(robot: &Vector2<f64>, goal: &Vector2<f64>, k_att: f64) -> ForceVector {
    let f = (goal - robot) * k_att;
    ForceVector::new(f.x, f.y)
}

/// Non-free cells whose centers lie within `d0` of `robot`, with their
/// offset `robot − center`.
fn cells_in_range<'a>(
    robot: &'a Vector2<f64>,
    map: &'a Costmap2D,
    d0: f64,
) -> impl Iterator<Item = Vector2<f64>> + 'a {
    let res = map.resolution;
    let lo_i = (((robot.x - d0 - map.origin.x) / res).floor().max(0.0)) as usize;
    let lo_j = (((robot.y - d0 - map.origin.y) / res).floor().max(0.0)) as usize;
    let hi_i = (((robot.x + d0 - map.origin.x) / res).ceil().max(0.0) as usize).min(map.width);
    let hi_j = (((robot.y + d0 - map.origin.y) / res).ceil().max(0.0) as usize).min(map.height);
    (lo_j..hi_j)
        .flat_map(move |j| (lo_i..hi_i).map(move |i| (i, j)))
        .filter(move |&(i, j)| !map.get(i, j).is_free())
        .map(move |(i, j)| robot - map.cell_center(i, j))
        .filter(move |off| off.norm() < d0)
}

pub fn repulsive_potential(robot: &Vector2<f64>, map: &Costmap2D, k_rep: f64, d0: f64) -> f64 {
    let d_min = map.resolution / 2.0;
    cells_in_range(robot, map, d0)
        .map(|off| {
            let d = off.norm().max(d_min);
            0.5 * k_rep * (1.0 / d - 1.0 / d0).powi(2)
        })
        .sum()
}

/// Sum of `k_rep·(1/d − 1/d0)/d²` along the cell-to-robot direction over
/// every non-free cell closer than `d0`. Distances are clamped below by
/// half a cell.
pub fn repulsive_force(robot: &Vector2<f64>, map: &Costmap2D, k_rep: f64, d0: f64) -> ForceVector {
    let d_min = map.resolution / 2.0;
    let f = cells_in_range(robot, map, d0).fold(Vector2::zeros(), |acc, off| {
        let raw = off.norm();
        if raw == 0.0 {
            return acc;
        }
        let d = raw.max(d_min);
        acc + off / raw * (k_rep * (1.0 / d - 1.0 / d0) / (d * d))
    });
    ForceVector::new(f.x, f.y)
}

pub fn apf_force(robot: &Vector2<f64>, goal: &Vector2<f64>, map: &Costmap2D, params: &ApfParams) -> ForceVector {
    attractive_force(robot, goal, params.k_att) + repulsive_force(robot, map, params.k_rep, params.d0)
}

/// Maps a body-frame force onto a smoothed, clamped velocity command.
///
/// Forward speed follows the force component along the heading (never
/// negative) and the yaw rate turns toward the force bearing.
pub fn admittance_map(f: &ForceVector, params: &ApfParams, prev: &VelocityCommand, now: f64) -> VelocityCommand {
    let target_v = (params.admittance_gain * f.fx).max(0.0);
    let target_w = if f.norm() > 0.0 { params.yaw_gain * f.fy.atan2(f.fx) } else { 0.0 };
    let a = params.smoothing;
    let v = prev.v_x + a * (target_v - prev.v_x);
    let w = prev.w_z + a * (target_w - prev.w_z);
    VelocityCommand {
        v_x: v.clamp(-params.v_max, params.v_max),
        v_y: 0.0,
        w_z: w.clamp(-params.w_max, params.w_max),
        stamp: now,
        source: CommandSource::Apf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::Cell;

    fn map_with(cells: &[(usize, usize)]) -> Costmap2D {
        let mut m = Costmap2D::new(Vector2::new(-2.0, -2.0), 0.05, 80, 80).unwrap();
        for &(i, j) in cells {
            m.set(i, j, Cell::Occupied);
        }
        m
    }

    #[test]
    fn attractive_linear_law() {
        let z = Vector2::zeros();
        assert_eq!(attractive_force(&z, &z, 1.0), ForceVector::new(0.0, 0.0));
        assert_eq!(attractive_force(&z, &Vector2::new(1.0, 0.0), 1.0), ForceVector::new(1.0, 0.0));
        let g = Vector2::new(0.3, -0.7);
        let f1 = attractive_force(&z, &g, 1.5);
        let f2 = attractive_force(&z, &g, 3.0);
        assert_eq!((f2.fx, f2.fy), (2.0 * f1.fx, 2.0 * f1.fy));
    }

    #[test]
    fn repulsion_empty_and_boundary() {
        let m = map_with(&[]);
        assert_eq!(repulsive_force(&Vector2::zeros(), &m, 1.0, 1.0), ForceVector::default());
        // Cell (40, 40) has its center at (0.025, 0.025); place the robot
        // exactly d0 = 1 away along x.
        let m = map_with(&[(40, 40)]);
        let robot = Vector2::new(-0.975, 0.025);
        let f = repulsive_force(&robot, &m, 1.0, 1.0);
        assert!(f.norm() < 1e-12, "{f:?}");
    }

    #[test]
    fn repulsion_half_influence_radius() {
        // Obstacle center 0.5 m ahead: (1/0.5 − 1)/0.25 = 4, pointing back.
        let m = map_with(&[(40, 40)]);
        let robot = Vector2::new(0.025 - 0.5, 0.025);
        let f = repulsive_force(&robot, &m, 1.0, 1.0);
        assert!((f.fx + 4.0).abs() < 1e-9 && f.fy.abs() < 1e-12, "{f:?}");
        // Central difference of U_rep agrees.
        let h = 1e-5;
        let up = repulsive_potential(&(robot + Vector2::new(h, 0.0)), &m, 1.0, 1.0);
        let dn = repulsive_potential(&(robot - Vector2::new(h, 0.0)), &m, 1.0, 1.0);
        assert!((-(up - dn) / (2.0 * h) + 4.0).abs() < 1e-4);
    }

    #[test]
    fn empty_map_force_is_attraction() {
        let m = map_with(&[]);
        let p = ApfParams::default();
        let r = Vector2::new(0.1, 0.2);
        let g = Vector2::new(3.0, -1.0);
        assert_eq!(apf_force(&r, &g, &m, &p), attractive_force(&r, &g, p.k_att));
        assert_eq!(apf_force(&g, &g, &m, &p), ForceVector::default());
    }

    #[test]
    fn admittance_signs_and_clamps() {
        let p = ApfParams::default();
        let prev = VelocityCommand::zero(CommandSource::Apf, 0.0);
        let z = admittance_map(&ForceVector::default(), &p, &prev, 0.1);
        assert_eq!((z.v_x, z.v_y, z.w_z), (0.0, 0.0, 0.0));
        let ahead = admittance_map(&ForceVector::new(2.0, 0.0), &p, &prev, 0.1);
        assert!(ahead.v_x > 0.0 && ahead.w_z == 0.0);
        let left = admittance_map(&ForceVector::new(1.0, 1.0), &p, &prev, 0.1);
        assert!(left.w_z > 0.0);
        let mut c = prev;
        for k in 0..100 {
            c = admittance_map(&ForceVector::new(1e6, -1e6), &p, &c, k as f64);
            assert!(c.v_x.abs() <= p.v_max && c.w_z.abs() <= p.w_max);
        }
        assert_eq!(c.source, CommandSource::Apf);
    }

    #[test]
    fn params_validation() {
        assert!(ApfParams::default().validate(0.05).is_ok());
        let p = ApfParams { d0: 0.04, ..Default::default() };
        assert_eq!(p.validate(0.05).unwrap_err().0, "d0_m");
        let p = ApfParams { k_rep: 0.0, ..Default::default() };
        assert_eq!(p.validate(0.05).unwrap_err().0, "k_rep");
    }
}
