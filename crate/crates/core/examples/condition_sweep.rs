//! All three conditions over a handful of seeds, summarized per condition.
//! The acceptance suite runs the same comparison over 20 seeds.

use crossview_guide::harness::{load_scenario, run_sweep, SweepSpec};
use crossview_guide::sim::Condition;

fn main() {
    let s = load_scenario("canonical").expect("built-in scenario");
    let seeds = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5u64);
    let spec = SweepSpec {
        conditions: Condition::ALL.to_vec(),
        seeds: (0..seeds).collect(),
        out: std::env::temp_dir().join("crossview_sweep"),
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let (reports, summary) = run_sweep(&s, &spec).expect("sweep runs");
    for r in &reports {
        println!("{r}");
    }
    println!();
    print!("{summary}");
    println!("traces and summary.csv in {}", spec.out.display());
}
