//! Hazard announcements from one guided episode. Pass a program name to
//! use it as the describer over the JSON line protocol instead of the
//! built-in template, e.g. `cargo run --example sentinel_describer -- cat`.

use crossview_guide::harness::load_scenario;
use crossview_guide::sentinel::{Describer, ProcessDescriber, TemplateDescriber, HAZARD_PROMPT};
use crossview_guide::sim::{run_episode_with, Condition};

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let mut describer: Box<dyn Describer> = match std::env::args().nth(1) {
        Some(program) => Box::new(ProcessDescriber::spawn(&program, &[]).expect("describer starts")),
        None => Box::new(TemplateDescriber),
    };
    println!("prompt: {HAZARD_PROMPT}");
    let e = run_episode_with(&s.scene, Condition::SingleView, 5, &s.sim, describer.as_mut()).expect("episode runs");
    println!(
        "{} announcements (d_crit {} m, debounce {} s)",
        e.announcements.len(),
        s.sim.sentinel.d_crit,
        s.sim.sentinel.debounce
    );
    print!("{}", e.announcements);
}
