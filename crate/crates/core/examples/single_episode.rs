//! One cross-view episode: report, text plot, and trace files on disk.

use crossview_guide::harness::{load_scenario, render_svg, render_text};
use crossview_guide::sim::{run_episode, Condition};

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7);
    let mut e = run_episode(&s.scene, Condition::CrossView, seed, &s.sim).expect("episode runs");
    let out = std::env::temp_dir().join("crossview_example");
    let trace = e.write(&out).expect("writable temp dir");
    std::fs::write(out.join("episode.svg"), render_svg(&e.trace)).expect("writable temp dir");
    println!("{}", e.report);
    print!("{}", render_text(&e.trace, 100, 16));
    for c in &e.collisions {
        println!("collision at {:.2} s: {:?} touched {} ({})", c.time, c.body, e.scene.obstacles[c.obstacle].id, c.kind.label());
    }
    println!("trace: {}", trace.display());
}
