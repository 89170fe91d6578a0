//! Deterministic SVG drawing of a layout.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{FarmInstance, InputError};
use crate::graph::{NodeId, NodeKind};
use crate::model::LayoutSolution;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;
const LEGEND_H: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
const UNASSIGNED: &str = "#7f7f7f";

fn color(cable: Option<usize>) -> &'static str {
    cable.map_or(UNASSIGNED, |t| PALETTE[t % PALETTE.len()])
}

/// Largest 1/2/5·10^n not above `x`.
fn nice(x: f64) -> f64 {
    let p = 10f64.powf(x.log10().floor());
    [5.0, 2.0, 1.0].into_iter().map(|m| m * p).find(|&v| v <= x).unwrap_or(p)
}

pub fn svg_string(layout: Option<&LayoutSolution>, farm: &FarmInstance) -> String {
    let xs = farm.nodes.iter().map(|n| n.position.x);
    let ys = farm.nodes.iter().map(|n| n.position.y);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = (x1 - x0).max(y1 - y0).max(1.0);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = ((y1 - y0) * scale + 2.0 * MARGIN + LEGEND_H).round();
    // North up: flip y.
    let px = |x: f64| MARGIN + (x - x0) * scale;
    let py = |y: f64| MARGIN + (y1 - y) * scale;
    let pos = |id: NodeId| farm.nodes.iter().find(|n| n.id == id).map(|n| n.position);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut used = BTreeSet::new();
    if let Some(l) = layout {
        let _ = writeln!(s, r#"<g stroke-width="2">"#);
        for a in &l.arcs {
            let (Some(p), Some(q)) = (pos(a.tail), pos(a.head)) else { continue };
            used.insert(a.cable);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                px(p.x),
                py(p.y),
                px(q.x),
                py(q.y),
                color(a.cable)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    for n in &farm.nodes {
        let (r, fill) = if n.kind == NodeKind::Oss { (7.0, "black") } else { (4.0, "white") };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"><title>{}</title></circle>"#,
            px(n.position.x),
            py(n.position.y),
            n.id
        );
    }
    let _ = writeln!(s, "</g>");

    let base = height - LEGEND_H + 20.0;
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    for (i, cable) in used.iter().enumerate() {
        let x = MARGIN + 150.0 * i as f64;
        let label = match cable {
            Some(t) => farm.cables.get(*t).map_or_else(|| format!("cable {t}"), |c| c.name.clone()),
            None => "unassigned".to_string(),
        };
        let _ = writeln!(s, r#"<rect x="{x:.2}" y="{:.2}" width="20" height="6" fill="{}"/>"#, base - 6.0, color(*cable));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{base:.2}">{label}</text>"#, x + 26.0);
    }
    let meters = nice(span / 4.0);
    let len = meters * scale;
    let sx = WIDTH - MARGIN - len;
    let sy = base + 20.0;
    let _ = writeln!(s, r#"<path d="M{sx:.2} {sy:.2} h{len:.2}" stroke="black" stroke-width="2" fill="none"/>"#);
    let _ = writeln!(s, r#"<text x="{sx:.2}" y="{:.2}">{meters} m</text>"#, sy - 4.0);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

pub fn render_svg(layout: Option<&LayoutSolution>, farm: &FarmInstance, path: &Path) -> Result<(), InputError> {
    std::fs::write(path, svg_string(layout, farm)).map_err(|e| InputError::io(path, e))
}
