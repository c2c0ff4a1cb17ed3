//! The `crossview` command line: `run`, `sweep`, `trace` and `check`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::sim::{run_episode, Condition, Trace};

use super::plot::{render_svg, render_text};
use super::scenario::{effective_config, load_scenario};
use super::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "crossview", version, about = "Cross-view guide robot simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one episode and print its report.
    Run(RunArgs),
    /// Run every condition/seed pair and write summary statistics.
    Sweep(SweepArgs),
    /// Plot a trace CSV as text, and optionally as SVG.
    Trace(TraceArgs),
    /// Validate a scenario without running it.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Built-in scenario name or path to a scenario file.
    #[arg(long, default_value = "canonical")]
    scenario: String,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_parser = parse_condition, default_value = "crossview")]
    condition: Condition,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the trace and announcement log.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Repeat to select several; all three by default.
    #[arg(long, value_parser = parse_condition)]
    condition: Vec<Condition>,
    /// `A..B` (end exclusive), `A..=B`, or a single seed.
    #[arg(long, value_parser = parse_seed_list, default_value = "0..20")]
    seeds: SeedList,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
    /// Episodes run in parallel.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Trace CSV written by `run` or `sweep`.
    file: PathBuf,
    /// Write an SVG plot here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    cols: usize,
    #[arg(long, default_value_t = 24)]
    lines: usize,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Print the fully resolved configuration.
    #[arg(long)]
    print_effective: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct SeedList(Vec<u64>);

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse()
}

/// Parses `A..B`, `A..=B` or `N` into a seed list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed {t:?}: {e}"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        vec![num(s)?]
    };
    if seeds.is_empty() {
        return Err(format!("seed range {s:?} is empty"));
    }
    Ok(seeds)
}

impl std::str::FromStr for SeedList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_seeds(s).map(SeedList)
    }
}

fn parse_seed_list(s: &str) -> Result<SeedList, String> {
    s.parse()
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), String> {
    let w = |r: std::io::Result<()>| r.map_err(|e| e.to_string());
    match command {
        Command::Run(a) => {
            let s = load_scenario(&a.scenario.scenario).map_err(|e| e.to_string())?;
            let mut episode = run_episode(&s.scene, a.condition, a.seed, &s.sim).map_err(|e| e.to_string())?;
            episode.write(&a.out).map_err(|e| format!("{}: {e}", a.out.display()))?;
            w(writeln!(out, "{}", episode.report))
        }
        Command::Sweep(a) => {
            let s = load_scenario(&a.scenario.scenario).map_err(|e| e.to_string())?;
            let conditions = if a.condition.is_empty() { Condition::ALL.to_vec() } else { a.condition };
            let spec = SweepSpec { conditions, seeds: a.seeds.0, out: a.out, jobs: a.jobs.max(1) };
            let (reports, summary) = run_sweep(&s, &spec).map_err(|e| e.to_string())?;
            w(writeln!(out, "{} episodes written to {}", reports.len(), spec.out.display()))?;
            w(write!(out, "{summary}"))
        }
        Command::Trace(a) => {
            let trace = Trace::read_from(&a.file).map_err(|e| format!("{}: {e}", a.file.display()))?;
            if let Some(path) = &a.out {
                std::fs::write(path, render_svg(&trace)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            w(write!(out, "{}", render_text(&trace, a.cols, a.lines)))
        }
        Command::Check(a) => {
            let s = load_scenario(&a.scenario.scenario).map_err(|e| e.to_string())?;
            if a.print_effective {
                w(write!(out, "{}", effective_config(&s)))
            } else {
                w(writeln!(out, "ok: {s}"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("a..b").is_err());
    }

    #[test]
    fn usage_error_is_nonzero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(["crossview", "fly"], &mut out, &mut err);
        assert_ne!(code, 0);
        assert!(!err.is_empty());
    }
}
