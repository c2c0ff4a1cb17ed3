//! Depth-triggered hazard announcements.
//!
//! A cheap geometric test (minimum valid depth inside a forward ROI below a
//! critical threshold, debounced) gates a potentially slow describer. The
//! describer only produces text for the wearer; nothing it returns feeds
//! back into motion control.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::mpsc;
use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::world::{DepthImage, ObstacleKind};

/// Prompt handed to the describer alongside the scene summary.
pub const HAZARD_PROMPT: &str = "An obstacle is very close. Briefly describe what it is and its relative position.";

/// Half-open pixel window `[u_min, u_max) x [v_min, v_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoiSpec {
    pub u_min: usize,
    pub u_max: usize,
    pub v_min: usize,
    pub v_max: usize,
}

impl RoiSpec {
    /// Central 40% of the columns, rows from the horizon to 80% height.
    pub fn default_for(width: usize, height: usize) -> Self {
        Self {
            u_min: width * 3 / 10,
            u_max: width * 7 / 10,
            v_min: height / 2,
            v_max: height * 8 / 10,
        }
    }

    pub fn check(&self, width: usize, height: usize) -> Result<()> {
        if self.u_min >= self.u_max || self.v_min >= self.v_max || self.u_max > width || self.v_max > height {
            return Err(Error::RoiOutOfBounds {
                u_min: self.u_min,
                u_max: self.u_max,
                v_min: self.v_min,
                v_max: self.v_max,
                width,
                height,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentinelConfig {
    pub d_crit: f64,
    pub debounce: f64,
    pub roi: RoiSpec,
}

impl Default for SentinelConfig {
    fn default() -> Self {
        Self { d_crit: 1.2, debounce: 3.0, roi: RoiSpec::default_for(160, 120) }
    }
}

pub fn roi_min_depth(img: &DepthImage, roi: &RoiSpec) -> Result<Option<f64>> {
    roi.check(img.intrinsics.width, img.intrinsics.height)?;
    let mut best: Option<f64> = None;
    for v in roi.v_min..roi.v_max {
        for u in roi.u_min..roi.u_max {
            let d = img.get(u, v);
            if d.is_finite() && d > 0.0 && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trigger {
    pub stamp: f64,
    pub min_depth: f64,
}

/// Fires when `d_min < d_crit` and the debounce interval has elapsed.
pub fn check_trigger(d_min: Option<f64>, now: f64, cfg: &SentinelConfig, last_fire: Option<f64>) -> Option<Trigger> {
    let d = d_min?;
    let rested = last_fire.is_none_or(|t| now - t >= cfg.debounce);
    (d < cfg.d_crit && rested).then_some(Trigger { stamp: now, min_depth: d })
}

/// Debounce memory wrapped around [`check_trigger`].
#[derive(Debug, Clone, Default)]
pub struct Sentinel {
    last_fire: Option<f64>,
}

impl Sentinel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_fire(&self) -> Option<f64> {
        self.last_fire
    }

    pub fn observe(&mut self, d_min: Option<f64>, now: f64, cfg: &SentinelConfig) -> Option<Trigger> {
        let t = check_trigger(d_min, now, cfg, self.last_fire)?;
        self.last_fire = Some(now);
        Some(t)
    }
}

/// One obstacle visible to the robot camera.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrustumObstacle {
    pub id: String,
    #[serde(serialize_with = "ser_kind")]
    pub kind: ObstacleKind,
    /// Positive to the left of the camera axis.
    pub bearing_rad: f64,
    pub range_m: f64,
}

fn ser_kind<S: serde::Serializer>(k: &ObstacleKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(k.label())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SceneSummary {
    pub obstacles: Vec<FrustumObstacle>,
}

impl SceneSummary {
    pub fn nearest(&self) -> Option<&FrustumObstacle> {
        self.obstacles.iter().min_by(|a, b| a.range_m.total_cmp(&b.range_m))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescriberError {
    #[error("describer unavailable: {0}")]
    Unavailable(String),
}

/// Anything that turns a scene summary and prompt into a spoken sentence.
pub trait Describer {
    fn describe(&mut self, summary: &SceneSummary, min_depth: f64, prompt: &str) -> std::result::Result<String, DescriberError>;
}

/// Half-angle of the "center" sector used by [`TemplateDescriber`].
pub const CENTER_SECTOR_RAD: f64 = 15.0 * std::f64::consts::PI / 180.0;

/// Deterministic sentence template over the nearest visible obstacle.
#[derive(Debug, Clone, Copy, Default)]
pub struct TemplateDescriber;

impl Describer for TemplateDescriber {
    fn describe(&mut self, summary: &SceneSummary, min_depth: f64, _prompt: &str) -> std::result::Result<String, DescriberError> {
        Ok(match summary.nearest() {
            Some(o) => {
                let side = if o.bearing_rad > CENTER_SECTOR_RAD {
                    "left"
                } else if o.bearing_rad < -CENTER_SECTOR_RAD {
                    "right"
                } else {
                    "center"
                };
                format!("{} obstacle {} ahead, {:.1} meters, {}", o.kind.label(), o.id, o.range_m, side)
            }
            None => format!("obstacle ahead, {min_depth:.1} meters"),
        })
    }
}

#[derive(Serialize)]
struct DescribeRequest<'a> {
    prompt: &'a str,
    min_depth_m: f64,
    obstacles: &'a [FrustumObstacle],
}

/// Describer backed by an external program speaking a line protocol: one
/// JSON request object per line on its stdin, one line of text back on its
/// stdout.
pub struct ProcessDescriber {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ProcessDescriber {
    pub fn spawn(program: &str, args: &[&str]) -> std::result::Result<Self, DescriberError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| DescriberError::Unavailable(format!("cannot start {program}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
        Ok(Self { child, stdin, stdout })
    }
}

impl Describer for ProcessDescriber {
    fn describe(&mut self, summary: &SceneSummary, min_depth: f64, prompt: &str) -> std::result::Result<String, DescriberError> {
        let req = DescribeRequest { prompt, min_depth_m: min_depth, obstacles: &summary.obstacles };
        let line = serde_json::to_string(&req).map_err(|e| DescriberError::Unavailable(e.to_string()))?;
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| DescriberError::Unavailable(format!("write failed: {e}")))?;
        let mut reply = String::new();
        match self.stdout.read_line(&mut reply) {
            Ok(0) => Err(DescriberError::Unavailable("describer closed its output".into())),
            Ok(_) => Ok(reply.trim_end_matches(['\r', '\n']).to_string()),
            Err(e) => Err(DescriberError::Unavailable(format!("read failed: {e}"))),
        }
    }
}

impl Drop for ProcessDescriber {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardEvent {
    pub stamp: f64,
    pub min_depth: f64,
    pub scene_summary: SceneSummary,
    /// Empty when the describer failed.
    pub announcement: String,
}

/// Runs the describer for a fired trigger. Failures yield an event with an
/// empty announcement.
pub fn describe(trigger: &Trigger, summary: SceneSummary, describer: &mut dyn Describer) -> HazardEvent {
    let announcement = describer.describe(&summary, trigger.min_depth, HAZARD_PROMPT).unwrap_or_default();
    HazardEvent { stamp: trigger.stamp, min_depth: trigger.min_depth, scene_summary: summary, announcement }
}

/// Per-episode announcement log (the speech output stand-in).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnouncementLog {
    pub events: Vec<HazardEvent>,
}

impl AnnouncementLog {
    pub fn push(&mut self, e: HazardEvent) {
        self.events.push(e);
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_string())
    }
}

impl fmt::Display for AnnouncementLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stamp_s\tmin_depth_m\tannouncement")?;
        for e in &self.events {
            writeln!(f, "{:.3}\t{:.3}\t{}", e.stamp, e.min_depth, e.announcement)?;
        }
        Ok(())
    }
}

/// Runs a describer on a background thread so slow descriptions never
/// hold up trigger detection.
pub struct DescriberWorker {
    requests: Option<mpsc::Sender<(Trigger, SceneSummary)>>,
    completed: mpsc::Receiver<HazardEvent>,
    handle: Option<thread::JoinHandle<()>>,
}

impl DescriberWorker {
    pub fn spawn<D: Describer + Send + 'static>(mut describer: D) -> Self {
        let (req_tx, req_rx) = mpsc::channel::<(Trigger, SceneSummary)>();
        let (done_tx, done_rx) = mpsc::channel();
        let handle = thread::spawn(move || {
            for (trigger, summary) in req_rx {
                if done_tx.send(describe(&trigger, summary, &mut describer)).is_err() {
                    break;
                }
            }
        });
        Self { requests: Some(req_tx), completed: done_rx, handle: Some(handle) }
    }

    /// Queues a description without waiting for it.
    pub fn submit(&self, trigger: Trigger, summary: SceneSummary) {
        if let Some(tx) = &self.requests {
            let _ = tx.send((trigger, summary));
        }
    }

    /// Completed events so far.
    pub fn drain(&self) -> Vec<HazardEvent> {
        self.completed.try_iter().collect()
    }

    /// Waits for every queued request and returns the remaining events.
    pub fn finish(mut self) -> Vec<HazardEvent> {
        self.requests.take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
        self.completed.try_iter().collect()
    }
}
