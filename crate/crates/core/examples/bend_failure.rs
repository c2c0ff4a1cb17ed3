//! The wearer bends forward through the lamp approach, pointing the chest
//! camera at the floor. The hanging lamp drops out of view and the
//! override never comes.

use crossview_guide::harness::load_scenario;
use crossview_guide::sim::{run_episode, BendSchedule, Condition};

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let mut bent = s.sim.clone();
    bent.bend = BendSchedule { windows: vec![(5.0, 15.0)], ..BendSchedule::default() };
    println!("seed  upright(overhead, overrides)  bent(overhead, overrides)");
    for seed in 0..6 {
        let summarize = |cfg| {
            let e = run_episode(&s.scene, Condition::CrossView, seed, cfg).expect("episode runs");
            let overrides = e.trace.rows.windows(2).filter(|w| w[0].source != "human" && w[1].source == "human").count();
            (e.report.collisions_overhead, overrides)
        };
        let (uo, ur) = summarize(&s.sim);
        let (bo, br) = summarize(&bent);
        println!("{seed:>4}  {uo:>10} {ur:>10}              {bo:>8} {br:>10}");
    }
}
