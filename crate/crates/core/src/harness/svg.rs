//! Plain SVG drawings of runs and cognitive maps.

use std::fmt::Write;

use crate::geometry::{Disturbance, DisturbanceKind, Rect};
use crate::planner::CognitiveMap;

use super::experiment::RunRecord;

const PX_PER_M: f64 = 200.0;
const MARGIN: f64 = 20.0;

struct View {
    xmin: f64,
    ymax: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.xmin) * PX_PER_M, MARGIN + (self.ymax - y) * PX_PER_M)
    }

    fn polygon(&self, out: &mut String, r: &Rect, style: &str) {
        let pts: Vec<String> = r
            .corners()
            .iter()
            .map(|&(x, y)| {
                let (u, v) = self.px(x, y);
                format!("{u:.1},{v:.1}")
            })
            .collect();
        let _ = writeln!(out, r#"  <polygon points="{}" {style}/>"#, pts.join(" "));
    }
}

fn extent(rec: &RunRecord) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64| {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    };
    for d in rec.obstacles.iter().chain(rec.goal.iter()) {
        for (x, y) in d.rect().corners() {
            grow(x, y);
        }
    }
    for p in &rec.trajectory {
        grow(p.x, p.y);
    }
    (b.0 - 0.2, b.1 - 0.2, b.2 + 0.2, b.3 + 0.2)
}

fn body_style(d: &Disturbance) -> &'static str {
    match d.kind {
        DisturbanceKind::Target => r##"fill="#7fc97f" stroke="#1b7837""##,
        _ => r##"fill="#999999" stroke="#333333""##,
    }
}

/// Scenario bodies, the executed path and the end of each plan state.
pub fn trajectory_svg(rec: &RunRecord) -> String {
    let (xmin, ymin, xmax, ymax) = extent(rec);
    let view = View { xmin, ymax };
    let w = 2.0 * MARGIN + (xmax - xmin) * PX_PER_M;
    let h = 2.0 * MARGIN + (ymax - ymin) * PX_PER_M;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#);
    let _ = writeln!(
        out,
        r#"  <title>{} {} variant {} rep {}: {}</title>"#,
        rec.scenario,
        rec.strategy,
        rec.variant,
        rec.repetition,
        if rec.success { "success" } else { "failure" }
    );
    for d in rec.obstacles.iter().chain(rec.goal.iter()) {
        view.polygon(&mut out, &d.rect(), body_style(d));
    }
    let path: Vec<String> = rec
        .trajectory
        .iter()
        .map(|p| {
            let (u, v) = view.px(p.x, p.y);
            format!("{u:.1},{v:.1}")
        })
        .collect();
    let colour = if rec.success { "#2166ac" } else { "#b2182b" };
    let _ = writeln!(out, r#"  <polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#, path.join(" "));
    if let (Some(plan), Some(map)) = (&rec.plan, &rec.map) {
        for &id in &plan.states {
            let q = &map.states[id];
            let (u, v) = view.px(q.end.x, q.end.y);
            let _ = writeln!(out, r#"  <circle cx="{u:.1}" cy="{v:.1}" r="4" fill="{colour}"><title>q{id} {}</title></circle>"#, q.mode);
        }
    }
    if let Some(last) = rec.trajectory.last() {
        let foot = crate::geometry::RobotModel::default().footprint(last);
        view.polygon(&mut out, &foot, r#"fill="none" stroke="black" stroke-dasharray="3,2""#);
    }
    out.push_str("</svg>\n");
    out
}

/// The map as a tree, one row per depth. Plan states are outlined in red,
/// collided states filled grey.
pub fn map_svg(map: &CognitiveMap, psi: &[bool]) -> String {
    let n = map.states.len();
    let mut depth = vec![0usize; n];
    for q in &map.states {
        if let Some(p) = q.parent {
            depth[q.id] = depth[p] + 1;
        }
    }
    let rows = depth.iter().max().map_or(1, |d| d + 1);
    let mut col = vec![0usize; n];
    let mut per_row = vec![0usize; rows];
    for q in &map.states {
        col[q.id] = per_row[depth[q.id]];
        per_row[depth[q.id]] += 1;
    }
    let cols = per_row.iter().copied().max().unwrap_or(1);
    let (dx, dy) = (130.0, 70.0);
    let w = MARGIN * 2.0 + dx * cols as f64;
    let h = MARGIN * 2.0 + dy * rows as f64;
    let at = |id: usize| (MARGIN + dx * (col[id] as f64 + 0.5), MARGIN + dy * (depth[id] as f64 + 0.5));

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" font-family="monospace" font-size="10">"#);
    for &(a, b) in &map.edges {
        let (x1, y1) = at(a);
        let (x2, y2) = at(b);
        let stroke = if psi[a] && psi[b] { "#d7301f" } else { "#888888" };
        let _ = writeln!(out, r#"  <line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{stroke}"/>"#);
    }
    for q in &map.states {
        let (x, y) = at(q.id);
        let fill = if q.collided() { "#bbbbbb" } else { "#ffffff" };
        let (stroke, sw) = if psi[q.id] { ("#d7301f", 3) } else { ("#333333", 1) };
        let tag = q.d_n.map_or("", |d| d.kind.symbol());
        let _ = writeln!(out, r#"  <circle cx="{x:.1}" cy="{y:.1}" r="14" fill="{fill}" stroke="{stroke}" stroke-width="{sw}"/>"#);
        let _ = writeln!(out, r#"  <text x="{x:.1}" y="{:.1}" text-anchor="middle">q{} {}</text>"#, y + 4.0, q.id, q.mode);
        let _ = writeln!(out, r#"  <text x="{x:.1}" y="{:.1}" text-anchor="middle">φ={:.3} {tag}</text>"#, y + 26.0, q.phi);
    }
    out.push_str("</svg>\n");
    out
}
