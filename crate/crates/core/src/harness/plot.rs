//! Trace rendering: a top-down trajectory and a velocity profile, as SVG or
//! as a character plot for the terminal.

use std::fmt::Write as _;

use crate::sim::{Trace, TraceRow};

const W: f64 = 720.0;
const PANEL_H: f64 = 260.0;
const PAD: f64 = 40.0;

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        let margin = ((hi - lo) * 0.05).max(0.1);
        Self { lo: lo - margin, hi: hi + margin }
    }

    fn map(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, stroke: &str, dash: bool) -> String {
    let pts: Vec<String> = points.map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    let dash = if dash { r#" stroke-dasharray="5,3""# } else { "" };
    format!(
        r#"<polyline fill="none" stroke="{stroke}" stroke-width="1.5"{dash} points="{}"/>"#,
        pts.join(" ")
    ) + "\n"
}

/// Contiguous runs of rows whose source is `human`, as time intervals.
pub fn human_intervals(rows: &[TraceRow]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = None;
    for r in rows {
        match (r.source == "human", start) {
            (true, None) => start = Some(r.t),
            (false, Some(s)) => {
                out.push((s, r.t));
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(s), Some(last)) = (start, rows.last()) {
        out.push((s, last.t));
    }
    out
}

/// Two stacked panels: trajectories (robot solid, wearer dashed, collision
/// markers) and the executed `v_x` / `w_z` with human-override intervals
/// shaded.
pub fn render_svg(trace: &Trace) -> String {
    let rows = &trace.rows;
    let h = 2.0 * PANEL_H + 3.0 * PAD;
    let mut s = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{h}" font-family="monospace" font-size="11">"#
    );
    s.push('\n');

    let xr = Range::of(rows.iter().flat_map(|r| [r.robot_x, r.human_x]));
    let yr = Range::of(rows.iter().flat_map(|r| [r.robot_y, r.human_y]));
    let (x0, x1, y0, y1) = (PAD, W - PAD, PAD, PAD + PANEL_H);
    let px = |x: f64| xr.map(x, x0, x1);
    let py = |y: f64| yr.map(y, y1, y0);
    let _ = writeln!(s, r#"<text x="{x0}" y="{}">trajectory (robot solid, wearer dashed)</text>"#, y0 - 8.0);
    let _ = writeln!(s, r##"<rect x="{x0}" y="{y0}" width="{}" height="{PANEL_H}" fill="none" stroke="#999"/>"##, x1 - x0);
    s += &polyline(rows.iter().map(|r| (px(r.robot_x), py(r.robot_y))), "#1f5fbf", false);
    s += &polyline(rows.iter().map(|r| (px(r.human_x), py(r.human_y))), "#c0392b", true);
    for r in rows.iter().filter(|r| r.event.contains("hit_")) {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="none" stroke="#000"><title>{}</title></circle>"##,
            px(r.human_x),
            py(r.human_y),
            r.event
        );
    }

    let tr = Range::of(rows.iter().map(|r| r.t));
    let vr = Range::of(rows.iter().flat_map(|r| [r.v_x, r.w_z]));
    let (y0, y1) = (2.0 * PAD + PANEL_H, 2.0 * PAD + 2.0 * PANEL_H);
    let pt = |t: f64| tr.map(t, x0, x1);
    let pv = |v: f64| vr.map(v, y1, y0);
    let _ = writeln!(s, r#"<text x="{x0}" y="{}">velocity profile (v_x blue, w_z green, override shaded)</text>"#, y0 - 8.0);
    for (a, b) in human_intervals(rows) {
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{y0}" width="{:.1}" height="{PANEL_H}" fill="#f5d76e" fill-opacity="0.4"/>"##,
            pt(a),
            (pt(b) - pt(a)).max(1.0)
        );
    }
    let _ = writeln!(s, r##"<rect x="{x0}" y="{y0}" width="{}" height="{PANEL_H}" fill="none" stroke="#999"/>"##, x1 - x0);
    let zero = pv(0.0);
    let _ = writeln!(s, r##"<line x1="{x0}" y1="{zero:.1}" x2="{x1}" y2="{zero:.1}" stroke="#ccc"/>"##);
    s += &polyline(rows.iter().map(|r| (pt(r.t), pv(r.v_x))), "#1f5fbf", false);
    s += &polyline(rows.iter().map(|r| (pt(r.t), pv(r.w_z))), "#27ae60", false);
    s.push_str("</svg>\n");
    s
}

/// Character plot of the trajectories: `R` robot, `h` wearer, `X` a wearer
/// collision.
pub fn render_text(trace: &Trace, cols: usize, lines: usize) -> String {
    let rows = &trace.rows;
    let cols = cols.max(10);
    let lines = lines.max(4);
    let xr = Range::of(rows.iter().flat_map(|r| [r.robot_x, r.human_x]));
    let yr = Range::of(rows.iter().flat_map(|r| [r.robot_y, r.human_y]));
    let mut grid = vec![vec![' '; cols]; lines];
    let cell = |x: f64, y: f64| {
        let c = xr.map(x, 0.0, cols as f64 - 1.0).round() as usize;
        let l = yr.map(y, lines as f64 - 1.0, 0.0).round() as usize;
        (l.min(lines - 1), c.min(cols - 1))
    };
    for r in rows {
        let (l, c) = cell(r.human_x, r.human_y);
        grid[l][c] = 'h';
    }
    for r in rows {
        let (l, c) = cell(r.robot_x, r.robot_y);
        grid[l][c] = 'R';
    }
    for r in rows.iter().filter(|r| r.event.contains("hit_")) {
        let (l, c) = cell(r.human_x, r.human_y);
        grid[l][c] = 'X';
    }
    let mut out = format!("x {:.2}..{:.2} m, y {:.2}..{:.2} m\n", xr.lo, xr.hi, yr.lo, yr.hi);
    for line in grid {
        out.push('|');
        out.extend(line);
        out.push_str("|\n");
    }
    let overrides = human_intervals(rows);
    let _ = writeln!(out, "{} override interval(s):", overrides.len());
    for (a, b) in overrides {
        let _ = writeln!(out, "  {a:.2} s .. {b:.2} s");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, source: &str, event: &str) -> TraceRow {
        TraceRow {
            t,
            robot_x: t,
            robot_y: 0.0,
            robot_theta: 0.0,
            human_x: t - 0.8,
            human_y: 0.0,
            source: source.into(),
            a: source == "human",
            v_x: 0.5,
            v_y: 0.0,
            w_z: if source == "human" { 0.8 } else { 0.0 },
            min_roi_depth: None,
            event: event.into(),
        }
    }

    #[test]
    fn intervals_cover_human_runs() {
        let rows = vec![row(0.0, "apf", ""), row(1.0, "human", ""), row(2.0, "human", ""), row(3.0, "apf", ""), row(4.0, "human", "")];
        assert_eq!(human_intervals(&rows), vec![(1.0, 3.0), (4.0, 4.0)]);
    }

    #[test]
    fn renders_both_forms() {
        let trace = Trace { rows: vec![row(0.0, "apf", ""), row(1.0, "human", "hit_overhead:lamp"), row(2.0, "apf", "")] };
        let svg = render_svg(&trace);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        let txt = render_text(&trace, 40, 8);
        assert!(txt.contains('X') && txt.contains('R'));
        assert!(txt.contains("1 override interval"));
    }
}
