//! Scenario files, batch sweeps, trace plots and the command line.

pub mod cli;
mod plot;
mod scenario;
mod sweep;

pub use cli::{parse_seeds, run_cli};
pub use plot::{human_intervals, render_svg, render_text};
pub use scenario::{
    effective_config, load_scenario, parse_scenario, scenarios_dir, Scenario, ScenarioError, BUILTIN_SCENARIOS,
};
pub use sweep::{report_from_trace, run_sweep, summary_from_traces, ConditionSummary, Stats, SweepError, SweepSpec, SweepSummary};
