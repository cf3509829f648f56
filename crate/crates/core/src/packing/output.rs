use std::fmt::Write;

use serde::Serialize;

use super::DoublePacking;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleRecord {
    pub id: usize,
    pub kind: &'static str,
    pub radius: f64,
    pub center: [f64; 2],
}

pub fn circle_records(p: &DoublePacking) -> Vec<CircleRecord> {
    let vertices = (0..p.vertex_count()).map(|v| CircleRecord {
        id: v,
        kind: "vertex",
        radius: p.vertex_radius(v),
        center: [p.vertex_center(v).re, p.vertex_center(v).im],
    });
    let faces = (0..p.face_count()).map(|f| CircleRecord {
        id: f,
        kind: "face",
        radius: p.face_radius(f),
        center: [p.face_center(f).re, p.face_center(f).im],
    });
    vertices.chain(faces).collect()
}

/// Packing as a JSON array of circle records.
pub fn packing_json(p: &DoublePacking) -> serde_json::Value {
    serde_json::to_value(circle_records(p)).expect("circle records serialize")
}

/// SVG drawing: primal circles filled with a solid outline, dual circles
/// dashed, unit circle thin grey.
pub fn packing_svg(p: &DoublePacking) -> String {
    let size = 800.0;
    let scale = size / 2.2;
    let map = |x: f64, y: f64| (size / 2.0 + x * scale, size / 2.0 - y * scale);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    let (cx, cy) = map(0.0, 0.0);
    writeln!(s, r##"<circle cx="{cx:.4}" cy="{cy:.4}" r="{scale:.4}" fill="none" stroke="#999" stroke-width="0.5"/>"##)
        .unwrap();
    for v in 0..p.vertex_count() {
        let c = p.vertex_center(v);
        let (x, y) = map(c.re, c.im);
        writeln!(
            s,
            r##"<circle class="primal" cx="{x:.4}" cy="{y:.4}" r="{:.4}" fill="#cfe0f3" fill-opacity="0.8" stroke="#1f4e79" stroke-width="0.6"/>"##,
            p.vertex_radius(v) * scale
        )
        .unwrap();
    }
    for f in 0..p.face_count() {
        let c = p.face_center(f);
        let (x, y) = map(c.re, c.im);
        writeln!(
            s,
            r##"<circle class="dual" cx="{x:.4}" cy="{y:.4}" r="{:.4}" fill="none" stroke="#b03a2e" stroke-width="0.5" stroke-dasharray="2,2"/>"##,
            p.face_radius(f) * scale
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
