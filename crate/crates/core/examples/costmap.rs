//! One robot frame through the mapping pipeline: deproject, pass-through
//! filter, project and inflate. Prints the local costmap around the robot.

use crossview_guide::harness::load_scenario;
use crossview_guide::perception::Cell;
use crossview_guide::sim::robot_frame;
use crossview_guide::world::Pose2;

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let robot = Pose2::new(1.2, 0.0, 0.0);
    let f = robot_frame(&s.scene, &robot, &s.sim, 0.0, None).expect("pipeline runs");
    let m = &f.costmap;
    println!(
        "{} points kept of {} valid pixels; {} occupied, {} inflated cells (r_inf {} m)",
        f.filtered.len(),
        f.image.valid_count(),
        m.count(Cell::Occupied),
        m.count(Cell::Inflated),
        s.sim.costmap.r_inf
    );
    // Crop to the region ahead of the robot: x in [0, 3.5] m, y in [-1.5, 1.5] m.
    let art = m.to_ascii();
    let rows: Vec<&str> = art.lines().collect();
    let (i0, i1) = (m.cell_of(&[0.0, 0.0].into()).unwrap().0, m.cell_of(&[3.5, 0.0].into()).unwrap().0);
    let (j0, j1) = (m.cell_of(&[0.0, -1.5].into()).unwrap().1, m.cell_of(&[0.0, 1.5].into()).unwrap().1);
    for j in (j0..=j1).rev().step_by(2) {
        let row = rows[m.height - 1 - j];
        println!("{}", &row[i0..=i1]);
    }
    println!("('#' occupied, '+' inflated; robot at the left edge, facing right)");
}
