//! Batch runs over conditions and seeds, and their summary statistics.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::sim::{run_batch, Completion, Condition, EpisodeReport, SimError, Trace, TraceError};

use super::scenario::Scenario;

/// Which episodes to run and where to put them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub conditions: Vec<Condition>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub jobs: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("sweep needs at least one condition and one seed")]
    Empty,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Trace {
        path: PathBuf,
        #[source]
        source: TraceError,
    },
}

/// Sample mean and standard deviation (n − 1 denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { n, mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { n, mean, std }
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            f.write_str("-")
        } else {
            write!(f, "{:.2} ± {:.2}", self.mean, self.std)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub episodes: usize,
    pub reached: usize,
    pub collisions_total: Stats,
    pub collisions_ground: Stats,
    pub collisions_overhead: Stats,
    /// Over episodes that reached the goal.
    pub completion_time: Stats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<ConditionSummary>,
}

impl SweepSummary {
    /// Groups reports by condition, in `Condition` order.
    pub fn from_reports(reports: &[EpisodeReport]) -> Self {
        let rows = Condition::ALL
            .iter()
            .filter_map(|&c| {
                let group: Vec<&EpisodeReport> = reports.iter().filter(|r| r.condition == c).collect();
                if group.is_empty() {
                    return None;
                }
                let col = |f: fn(&EpisodeReport) -> usize| group.iter().map(|r| f(r) as f64).collect::<Vec<_>>();
                let times: Vec<f64> = group.iter().filter_map(|r| r.completion.time()).collect();
                Some(ConditionSummary {
                    condition: c,
                    episodes: group.len(),
                    reached: times.len(),
                    collisions_total: Stats::of(&col(|r| r.collisions_total)),
                    collisions_ground: Stats::of(&col(|r| r.collisions_ground)),
                    collisions_overhead: Stats::of(&col(|r| r.collisions_overhead)),
                    completion_time: Stats::of(&times),
                })
            })
            .collect();
        Self { rows }
    }

    pub fn row(&self, c: Condition) -> Option<&ConditionSummary> {
        self.rows.iter().find(|r| r.condition == c)
    }

    /// Machine-readable form: one CSV row per condition.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "condition,episodes,reached,collisions_total_mean,collisions_total_std,collisions_ground_mean,collisions_ground_std,collisions_overhead_mean,collisions_overhead_std,time_mean_s,time_std_s\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
                r.condition,
                r.episodes,
                r.reached,
                r.collisions_total.mean,
                r.collisions_total.std,
                r.collisions_ground.mean,
                r.collisions_ground.std,
                r.collisions_overhead.mean,
                r.collisions_overhead.std,
                r.completion_time.mean,
                r.completion_time.std
            ));
        }
        s
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<11} {:>8} {:>8} {:>14} {:>14} {:>14} {:>16}",
            "condition", "episodes", "reached", "collisions", "ground", "overhead", "time_s"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<11} {:>8} {:>8} {:>14} {:>14} {:>14} {:>16}",
                r.condition.as_str(),
                r.episodes,
                r.reached,
                r.collisions_total.to_string(),
                r.collisions_ground.to_string(),
                r.collisions_overhead.to_string(),
                r.completion_time.to_string()
            )?;
        }
        Ok(())
    }
}

/// Runs the sweep, writing one trace and announcement log per episode plus
/// `summary.txt` and `summary.csv` into `spec.out`.
pub fn run_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<(Vec<EpisodeReport>, SweepSummary), SweepError> {
    if spec.conditions.is_empty() || spec.seeds.is_empty() {
        return Err(SweepError::Empty);
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SweepError::Io { path, source }
    };
    let episodes = run_batch(&scenario.scene, &spec.conditions, &spec.seeds, &scenario.sim, spec.jobs)?;
    let mut reports = Vec::with_capacity(episodes.len());
    for mut e in episodes {
        e.write(&spec.out).map_err(io(&spec.out))?;
        reports.push(e.report);
    }
    let summary = SweepSummary::from_reports(&reports);
    let txt = spec.out.join("summary.txt");
    fs::write(&txt, summary.to_string()).map_err(io(&txt))?;
    let csv = spec.out.join("summary.csv");
    fs::write(&csv, summary.to_csv()).map_err(io(&csv))?;
    Ok((reports, summary))
}

/// Rebuilds an episode report from its trace alone.
pub fn report_from_trace(condition: Condition, seed: u64, trace: &Trace) -> EpisodeReport {
    let (ground, overhead) = trace.collision_counts();
    let tags = || trace.rows.iter().flat_map(|r| r.event.split(';'));
    let robot = tags().filter(|t| t.starts_with("robot_contact:")).count();
    let announcements = tags().filter(|&t| t == "announce").count();
    let last = trace.rows.last();
    let t = last.map_or(0.0, |r| r.t);
    let completion = match last.map(|r| r.event.as_str()) {
        Some(ev) if ev.split(';').any(|t| t == "reached") => Completion::Reached(t),
        Some(ev) if ev.split(';').any(|t| t == "stalled") => Completion::Stalled(t),
        _ => Completion::Timeout(t),
    };
    EpisodeReport {
        condition,
        seed,
        completion,
        collisions_total: ground + overhead,
        collisions_ground: ground,
        collisions_overhead: overhead,
        robot_collisions: robot,
        announcements,
        trace_path: None,
    }
}

/// Recomputes a sweep summary from the `<condition>_seedNNN.trace.csv`
/// files in `dir`.
pub fn summary_from_traces(dir: &Path) -> Result<SweepSummary, SweepError> {
    let entries = fs::read_dir(dir).map_err(|source| SweepError::Io { path: dir.to_path_buf(), source })?;
    let mut reports = Vec::new();
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for path in paths {
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Some(stem) = name.strip_suffix(".trace.csv") else { continue };
        let Some((cond, seed)) = stem.split_once("_seed") else { continue };
        let (Ok(condition), Ok(seed)) = (cond.parse::<Condition>(), seed.parse::<u64>()) else { continue };
        let trace = Trace::read_from(&path).map_err(|source| SweepError::Trace { path: path.clone(), source })?;
        reports.push(report_from_trace(condition, seed, &trace));
    }
    Ok(SweepSummary::from_reports(&reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std() {
        let s = Stats::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(s.mean, 5.0);
        assert!((s.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stats::of(&[3.0]).std, 0.0);
        assert!(Stats::of(&[]).mean.is_nan());
    }

    fn report(condition: Condition, seed: u64, ground: usize, overhead: usize, t: Option<f64>) -> EpisodeReport {
        EpisodeReport {
            condition,
            seed,
            completion: t.map_or(Completion::Timeout(120.0), Completion::Reached),
            collisions_total: ground + overhead,
            collisions_ground: ground,
            collisions_overhead: overhead,
            robot_collisions: 0,
            announcements: 0,
            trace_path: None,
        }
    }

    #[test]
    fn summary_groups_by_condition() {
        let reports = vec![
            report(Condition::CrossView, 0, 1, 0, Some(30.0)),
            report(Condition::SingleView, 0, 1, 2, Some(20.0)),
            report(Condition::CrossView, 1, 0, 0, None),
        ];
        let s = SweepSummary::from_reports(&reports);
        assert_eq!(s.rows.len(), 2);
        assert_eq!(s.rows[0].condition, Condition::SingleView);
        let cross = s.row(Condition::CrossView).unwrap();
        assert_eq!((cross.episodes, cross.reached), (2, 1));
        assert_eq!(cross.collisions_total.mean, 0.5);
        assert_eq!(cross.completion_time.mean, 30.0);
    }
}
