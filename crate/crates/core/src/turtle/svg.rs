use std::fmt::Write as _;

use super::{Geometry, Point, SegmentKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub stroke_width: f64,
    pub trunk_color: String,
    pub branch_color: String,
    pub twig_color: String,
    pub label_color: String,
    pub font_size: f64,
    /// Padding around the geometry's bounds, in pixels.
    pub margin: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            stroke_width: 2.0,
            trunk_color: "#5b3a1e".into(),
            branch_color: "#7a5230".into(),
            twig_color: "#3f7a2e".into(),
            label_color: "#222222".into(),
            font_size: 10.0,
            margin: 20.0,
        }
    }
}

impl SvgStyle {
    fn stroke(&self, kind: SegmentKind) -> &str {
        match kind {
            SegmentKind::Trunk => &self.trunk_color,
            SegmentKind::Branch => &self.branch_color,
            SegmentKind::Twig => &self.twig_color,
        }
    }
}

/// Fixed three-decimal rendering; never prints `-0.000`.
fn num(v: f64) -> String {
    let v = if v.abs() < 0.0005 { 0.0 } else { v };
    format!("{v:.3}")
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Writes a standalone SVG 1.1 document: one `line` per segment, one
/// `circle` per marker and one `text` per label.
pub fn emit_svg(geometry: &Geometry, style: &SvgStyle) -> String {
    let b = &geometry.bounds;
    let m = style.margin;
    let width = b.width() + 2.0 * m;
    let height = b.height() + 2.0 * m;
    let screen = |p: Point| (num(p.x - b.min.x + m), num(b.max.y - p.y + m));

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(width),
        h = num(height)
    );
    for s in &geometry.segments {
        let (x1, y1) = screen(s.from);
        let (x2, y2) = screen(s.to);
        let _ = writeln!(
            out,
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\"/>",
            escape(style.stroke(s.kind)),
            num(style.stroke_width)
        );
    }
    for mk in &geometry.markers {
        let (cx, cy) = screen(mk.center);
        let _ = writeln!(
            out,
            "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"{}\"/>",
            num(mk.radius),
            mk.kind.color()
        );
    }
    for l in &geometry.labels {
        let (x, y) = screen(l.anchor);
        let _ = writeln!(
            out,
            "  <text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"{}\" fill=\"{}\">{}</text>",
            num(style.font_size),
            escape(&style.label_color),
            escape(&l.text)
        );
    }
    out.push_str("</svg>\n");
    out
}
