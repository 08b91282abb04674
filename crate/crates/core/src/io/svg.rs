use std::fmt::Write as _;

use crate::model::{reconstruct_curve, FieldState};

/// Diverging map: `v = −1` blue, `v = 0` near white, `v = +1` red.
pub fn phase_color(v: f64) -> String {
    let t = v.clamp(-1.0, 1.0);
    let (lo, mid, hi) = ([33.0, 102.0, 172.0], [247.0, 247.0, 247.0], [178.0, 24.0, 43.0]);
    let (a, b, s) = if t < 0.0 { (mid, lo, -t) } else { (mid, hi, t) };
    let c: Vec<u8> = (0..3).map(|k| (a[k] + s * (b[k] - a[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// The reconstructed curve as one closed path, overlaid with one line per
/// edge colored by the edge's mean phase. The view box fits the curve with a
/// 5% margin; y points up.
pub fn render_svg(state: &FieldState) -> String {
    let pts = reconstruct_curve(state, [0.0, 0.0]);
    let n = state.n_points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let extent = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let margin = 0.05 * extent;
    let (vx, vy) = (x0 - margin, -y1 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = 0.006 * extent;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}" width="600" height="{}">"#,
        (600.0 * vh / vw).round()
    );
    let mut d = format!("M {} {}", pts[0][0], -pts[0][1]);
    for p in &pts[1..n] {
        let _ = write!(d, " L {} {}", p[0], -p[1]);
    }
    d.push_str(" Z");
    let _ = writeln!(
        out,
        r##"<path d="{d}" fill="none" stroke="#444444" stroke-width="{}"/>"##,
        2.0 * stroke
    );
    let _ = writeln!(out, r#"<g stroke-width="{stroke}" stroke-linecap="round">"#);
    for i in 0..n {
        let (a, b) = (pts[i], pts[i + 1]);
        let v = 0.5 * (state.v[i] + state.v[(i + 1) % n]);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}"/>"#,
            a[0],
            -a[1],
            b[0],
            -b[1],
            phase_color(v)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
