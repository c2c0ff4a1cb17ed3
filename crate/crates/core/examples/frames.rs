//! Frame conventions: where a point seen by the chest camera lands in the
//! robot's base frame.

use crossview_guide::geometry::{optical_to_physical, Sensor};
use crossview_guide::harness::load_scenario;
use crossview_guide::sim::{chest_to_robot, robot_optical_extrinsic};
use crossview_guide::world::Pose2;
use nalgebra::Vector3;

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let cfg = &s.sim;

    // Optical z is forward, x right, y down.
    let ahead = Vector3::new(0.0, 0.0, 2.0);
    println!("optical {ahead:?} -> physical {:?}", optical_to_physical(Sensor::Dog).apply(&ahead));
    println!("robot camera optical origin in base frame: {:?}", robot_optical_extrinsic(&cfg.robot_camera).apply(&Vector3::zeros()));

    // The wearer trails the robot by one leash length, slightly off axis.
    let robot = Pose2::new(3.0, 0.0, 0.0);
    let human = Pose2::new(2.2, 0.1, 0.0);
    let t = chest_to_robot(&robot, &human, &cfg.chest_camera, s.scene.human.chest_height, cfg.chest_camera.pitch);
    println!("{:?} -> {:?}", t.from_frame(), t.to_frame());
    for depth in [1.0, 2.0, 3.0] {
        let p = t.apply(&Vector3::new(0.0, 0.0, depth));
        println!("  {depth:.1} m along the chest camera axis is ({:+.3}, {:+.3}, {:+.3}) in the robot frame", p.x, p.y, p.z);
    }
}
