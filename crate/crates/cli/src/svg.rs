//! Deterministic SVG drawing: fixed size, fixed precision, y axis up.

use std::fmt::Write;

use msts_core::geometry::Point;
use msts_core::{ChoiceSolution, Instance};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
    height: f64,
}

impl View {
    fn new(inst: &Instance) -> View {
        let pts = inst.segments.iter().flat_map(|s| [s.a, s.b]);
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in pts {
            lo_x = lo_x.min(p.x);
            hi_x = hi_x.max(p.x);
            lo_y = lo_y.min(p.y);
            hi_y = hi_y.max(p.y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        View {
            min_x: lo_x,
            max_y: hi_y,
            scale,
            height: ((hi_y - lo_y) * scale + 2.0 * MARGIN).ceil(),
        }
    }

    fn x(&self, p: Point) -> String {
        fix((p.x - self.min_x) * self.scale + MARGIN)
    }

    fn y(&self, p: Point) -> String {
        fix((self.max_y - p.y) * self.scale + MARGIN)
    }
}

fn fix(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// `clause[i]` marks segments drawn with the `clause` class.
pub fn render(inst: &Instance, sol: Option<&ChoiceSolution>, clause: &[bool]) -> String {
    let v = View::new(inst);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = v.height
    );
    let _ = writeln!(
        out,
        "<style>.segment{{stroke:#444;stroke-width:1.5}}.clause{{stroke:#c03030;stroke-dasharray:4 2}}\
         .tree-edge{{stroke:#1060c0;stroke-width:3}}.endpoint{{fill:#000}}</style>"
    );
    if !inst.name.is_empty() {
        let _ = writeln!(out, "<title>{}</title>", escape(&inst.name));
    }
    for (i, s) in inst.segments.iter().enumerate() {
        let class = if clause.get(i).copied().unwrap_or(false) {
            "segment clause"
        } else {
            "segment"
        };
        let _ = writeln!(
            out,
            r#"<line class="{class}" data-index="{i}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            v.x(s.a),
            v.y(s.a),
            v.x(s.b),
            v.y(s.b)
        );
    }
    if let Some(sol) = sol {
        let pts = &sol.tree.nodes;
        for &(i, j) in &sol.tree.edges {
            let _ = writeln!(
                out,
                r#"<line class="tree-edge" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                v.x(pts[i]),
                v.y(pts[i]),
                v.x(pts[j]),
                v.y(pts[j])
            );
        }
        for p in pts {
            let _ = writeln!(
                out,
                r#"<circle class="endpoint" cx="{}" cy="{}" r="3"/>"#,
                v.x(*p),
                v.y(*p)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
