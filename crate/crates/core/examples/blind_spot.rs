//! What each camera perceives of the hanging lamp from the same instant:
//! the robot's costmap is blind to it, the chest camera is not.

use crossview_guide::harness::load_scenario;
use crossview_guide::sim::probe_viewpoints;
use crossview_guide::world::Pose2;

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let leash = s.scene.human.leash_length;
    for robot_x in [2.8, 3.4, 4.0] {
        let robot = Pose2::new(robot_x, 0.0, 0.0);
        let human = Pose2::new(robot_x - leash, 0.0, 0.0);
        let p = probe_viewpoints(&s.scene, &s.sim, &robot, &human).expect("probe runs");
        println!(
            "robot at x={robot_x:.1}: robot camera sees {:>4} lamp pixels, costmap keeps {} overhead cells \
             ({} ground); chest camera sees {:>4} overhead points",
            p.robot_raw_overhead_points, p.robot_overhead_cells, p.robot_ground_cells, p.chest_overhead_points
        );
    }
}
