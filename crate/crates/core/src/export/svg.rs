//! Deterministic SVG rendering of the closed cross-section.

use std::fmt::Write;

use crate::params::HelfrichParams;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 60.0;

/// Tick spacing from the 1-2-5 sequence giving roughly `target` ticks.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{:.*}", digits, v);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Renders `curve` (closed, in data coordinates) with equal axis scaling,
/// tick marks and a parameter caption.
pub fn render(curve: &[(f64, f64)], params: &HelfrichParams, w0p: f64) -> String {
    let x_max = curve.iter().fold(0.0f64, |m, p| m.max(p.0.abs())) * 1.1;
    let y_max = curve.iter().fold(0.0f64, |m, p| m.max(p.1.abs())) * 1.1;
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let y_max = if y_max > 0.0 { y_max } else { x_max };
    let scale = (WIDTH - 2.0 * MARGIN) / (2.0 * x_max);
    let height = 2.0 * MARGIN + 2.0 * y_max * scale + 30.0;
    let cx = WIDTH / 2.0;
    let cy = MARGIN + y_max * scale;
    let px = |x: f64| cx + x * scale;
    let py = |y: f64| cy - y * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}" fill="white"/>"#);

    // axes through the origin
    let (x0, x1) = (px(-x_max), px(x_max));
    let (y0, y1) = (py(y_max), py(-y_max));
    let _ = writeln!(s, r##"<g stroke="#888" stroke-width="1">"##);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{cy:.2}" x2="{x1:.2}" y2="{cy:.2}"/>"#);
    let _ = writeln!(s, r#"<line x1="{cx:.2}" y1="{y0:.2}" x2="{cx:.2}" y2="{y1:.2}"/>"#);
    let step = tick_step(2.0 * x_max, 8.0);
    for t in ticks(-x_max, x_max, step) {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, cy - 4.0, cy + 4.0);
    }
    for t in ticks(-y_max, y_max, step) {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, cx - 4.0, cx + 4.0);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="11" fill="#444">"##);
    for t in ticks(-x_max, x_max, step).into_iter().filter(|t| *t != 0.0) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, px(t), cy + 16.0, label(t, step));
    }
    for t in ticks(-y_max, y_max, step).into_iter().filter(|t| *t != 0.0) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, cx - 6.0, py(t) + 4.0, label(t, step));
    }
    let _ = writeln!(s, "</g>");

    let mut d = String::new();
    for (i, &(x, y)) in curve.iter().enumerate() {
        let _ = write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, px(x), py(y));
    }
    d.push('Z');
    let _ = writeln!(s, r##"<path d="{d}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##);
    let _ = writeln!(
        s,
        r##"<text x="{MARGIN:.0}" y="{:.2}" font-family="sans-serif" font-size="13" fill="#000">c0 = {}, lambda = {}, p = {}, w0' = {}</text>"##,
        height - 12.0,
        params.c0,
        params.lambda,
        params.p,
        w0p
    );
    s.push_str("</svg>\n");
    s
}
