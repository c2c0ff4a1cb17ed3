//! Renders the canonical course from the robot's camera and prints the
//! depth image as characters (nearer is darker).

use crossview_guide::harness::load_scenario;
use crossview_guide::sim::robot_camera_pose;
use crossview_guide::world::{render_depth_labeled, Pose2};

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let rig = &s.sim.robot_camera;
    let robot = Pose2::new(1.2, 0.0, 0.0);
    let (img, labels) = render_depth_labeled(&s.scene, &robot_camera_pose(&robot, rig), &rig.intrinsics).expect("world-frame pose");
    let ramp = ['@', '%', '#', '*', '+', '=', '-', ':', '.'];
    let w = img.intrinsics.width;
    for v in (0..img.intrinsics.height).step_by(4) {
        let line: String = (0..w)
            .step_by(2)
            .map(|u| {
                let d = img.get(u, v);
                if d <= 0.0 {
                    ' '
                } else {
                    ramp[((d / img.intrinsics.max_range) * (ramp.len() - 1) as f64).round() as usize]
                }
            })
            .collect();
        println!("{line}");
    }
    println!("{} of {} pixels valid", img.valid_count(), img.depth.len());
    let mut seen: Vec<&str> = labels.iter().flatten().map(|&i| s.scene.obstacles[i as usize].id.as_str()).collect();
    seen.sort_unstable();
    seen.dedup();
    println!("visible obstacles: {seen:?}");
}
