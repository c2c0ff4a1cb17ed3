//! Planner in isolation: force vectors around an obstacle and a short
//! closed-loop rollout with perfect perception of a single box.

use crossview_guide::geometry::FrameId;
use crossview_guide::perception::{build_costmap, inflate, Costmap2D, PointCloud};
use crossview_guide::planner::{admittance_map, apf_force, ApfParams, CommandSource, VelocityCommand};
use crossview_guide::sim::integrate_pose;
use crossview_guide::world::Pose2;
use nalgebra::{Vector2, Vector3};

fn main() {
    let params = ApfParams::default();
    let goal = Vector2::new(6.0, 0.0);
    // A 0.4 m box centered at (3, 0.15), sampled as world points.
    let pts: Vec<Vector3<f64>> = (0..9)
        .flat_map(|i| (0..9).map(move |j| Vector3::new(2.8 + i as f64 * 0.05, -0.05 + j as f64 * 0.05, 0.2)))
        .collect();

    println!("force field (world frame):");
    for y in [0.6, 0.3, 0.0, -0.3] {
        let row: Vec<String> = [1.5, 2.0, 2.4]
            .iter()
            .map(|&x| {
                let map = local_map(&Pose2::new(x, y, 0.0), &pts);
                let f = apf_force(&Vector2::zeros(), &(goal - Vector2::new(x, y)), &map, &params);
                format!("({x:.1},{y:+.1}) -> [{:+.2}, {:+.2}]", f.fx, f.fy)
            })
            .collect();
        println!("  {}", row.join("   "));
    }

    let mut pose = Pose2::new(0.0, 0.0, 0.0);
    let mut cmd = VelocityCommand::zero(CommandSource::Apf, 0.0);
    let dt = 0.1;
    let mut min_clearance = f64::INFINITY;
    for k in 0..200 {
        let map = local_map(&pose, &pts);
        let g = pose.to_local(&goal);
        let f = apf_force(&Vector2::zeros(), &g, &map, &params);
        cmd = admittance_map(&f, &params, &cmd, k as f64 * dt);
        pose = integrate_pose(&pose, &cmd, dt);
        min_clearance = pts.iter().map(|p| (p.xy() - pose.xy()).norm()).fold(min_clearance, f64::min);
        if k % 20 == 0 {
            println!("t={:4.1}s pose=({:.2}, {:+.2}, {:+.2} rad) v={:.2} w={:+.2}", k as f64 * dt, pose.x, pose.y, pose.theta, cmd.v_x, cmd.w_z);
        }
        if (pose.xy() - goal).norm() < 0.2 {
            println!("reached goal at t={:.1}s", k as f64 * dt);
            break;
        }
    }
    println!("closest approach to the box: {min_clearance:.2} m");
}

/// Robot-centred inflated costmap of the points, as the planner sees it.
fn local_map(pose: &Pose2, pts: &[Vector3<f64>]) -> Costmap2D {
    let local = pts.iter().map(|p| {
        let q = pose.to_local(&p.xy());
        Vector3::new(q.x, q.y, p.z)
    });
    let cloud = PointCloud::new(local.collect(), FrameId::RobotBase, 0.0);
    let map = build_costmap(&cloud, Vector2::new(-2.0, -4.0), 0.05, 160, 160).expect("valid grid");
    inflate(&map, 0.35)
}
