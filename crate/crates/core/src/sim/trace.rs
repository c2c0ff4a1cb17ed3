//! Episode trace: one CSV row per physics tick.

use std::fmt::Write as _;
use std::path::Path;

pub const TRACE_HEADER: &str = "t,robot_x,robot_y,robot_theta,human_x,human_y,source,A,v_x,v_y,w_z,min_roi_depth,event";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub robot_x: f64,
    pub robot_y: f64,
    pub robot_theta: f64,
    pub human_x: f64,
    pub human_y: f64,
    /// `apf`, `human`, `stop` or `walker`.
    pub source: String,
    pub a: bool,
    pub v_x: f64,
    pub v_y: f64,
    pub w_z: f64,
    pub min_roi_depth: Option<f64>,
    /// `;`-separated tags such as `hit_overhead:lamp` or `announce`.
    pub event: String,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 96);
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let depth = r.min_roi_depth.map(|d| format!("{d:.4}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:.3},{:.5},{:.5},{:.5},{:.5},{:.5},{},{},{:.5},{:.5},{:.5},{},{}",
                r.t,
                r.robot_x,
                r.robot_y,
                r.robot_theta,
                r.human_x,
                r.human_y,
                r.source,
                u8::from(r.a),
                r.v_x,
                r.v_y,
                r.w_z,
                depth,
                r.event
            );
        }
        s
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    pub fn read_from(path: &Path) -> Result<Self, TraceError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            _ => return Err(TraceError::Malformed { line: 1, message: "missing trace header".into() }),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let line_no = i + 1;
            let bad = |m: String| TraceError::Malformed { line: line_no, message: m };
            let f: Vec<&str> = line.splitn(13, ',').collect();
            if f.len() != 13 {
                return Err(bad(format!("expected 13 columns, found {}", f.len())));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|e| bad(format!("column {k}: {e}")));
            rows.push(TraceRow {
                t: num(0)?,
                robot_x: num(1)?,
                robot_y: num(2)?,
                robot_theta: num(3)?,
                human_x: num(4)?,
                human_y: num(5)?,
                source: f[6].to_string(),
                a: match f[7] {
                    "1" => true,
                    "0" => false,
                    other => return Err(bad(format!("A must be 0 or 1, got {other}"))),
                },
                v_x: num(8)?,
                v_y: num(9)?,
                w_z: num(10)?,
                min_roi_depth: if f[11].is_empty() { None } else { Some(num(11)?) },
                event: f[12].to_string(),
            });
        }
        Ok(Self { rows })
    }

    /// Human collision counts `(ground, overhead)` recovered from the events.
    pub fn collision_counts(&self) -> (usize, usize) {
        let mut ground = 0;
        let mut overhead = 0;
        for tag in self.rows.iter().flat_map(|r| r.event.split(';')) {
            if tag.starts_with("hit_ground:") {
                ground += 1;
            } else if tag.starts_with("hit_overhead:") {
                overhead += 1;
            }
        }
        (ground, overhead)
    }

    /// Command columns only, for comparisons that must ignore sensing output.
    pub fn command_columns(&self) -> Vec<(String, bool, f64, f64, f64)> {
        self.rows.iter().map(|r| (r.source.clone(), r.a, r.v_x, r.v_y, r.w_z)).collect()
    }
}
