//! Bare-bones SVG line and scatter plots: axes, tick values, labels.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Draw larger y values lower down.
    pub invert_y: bool,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    invert_y: bool,
}

impl Frame {
    fn fit(points: &[(f64, f64)], invert_y: bool) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x1 > x0) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if !(y1 > y0) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        Frame { x0, x1, y0, y1, invert_y }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let t = (y - self.y0) / (self.y1 - self.y0);
        let t = if self.invert_y { t } else { 1.0 - t };
        TOP + t * (H - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

fn open(plot: &Plot, frame: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(plot.title)
    );
    let (bx, by) = (LEFT, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{by} H{}" fill="none" stroke="black"/>"#,
        W - RIGHT
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x0 + t * (frame.x1 - frame.x0);
        let yv = frame.y0 + t * (frame.y1 - frame.y0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(s, r#"<line x1="{xp:.1}" y1="{by}" x2="{xp:.1}" y2="{}" stroke="black"/>"#, by + 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{xp:.1}" y="{}" text-anchor="middle">{}</text>"#,
            by + 18.0,
            tick(xv)
        );
        let _ = writeln!(s, r#"<line x1="{}" y1="{yp:.1}" x2="{bx}" y2="{yp:.1}" stroke="black"/>"#, bx - 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            bx - 7.0,
            yp + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        escape(plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        escape(plot.y_label)
    );
    s
}

pub fn line_plot(plot: &Plot, points: &[(f64, f64)]) -> String {
    let frame = Frame::fit(points, plot.invert_y);
    let mut s = open(plot, &frame);
    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        path.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// Scatter with one text label per point.
pub fn scatter_plot(plot: &Plot, points: &[(f64, f64, String)]) -> String {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1)).collect();
    let frame = Frame::fit(&xy, plot.invert_y);
    let mut s = open(plot, &frame);
    for (x, y, label) in points {
        let (px, py) = (frame.px(*x), frame.py(*y));
        let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4" fill="steelblue"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            px + 6.0,
            py - 6.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_documents() {
        let plot = Plot {
            title: "a <b>",
            x_label: "k",
            y_label: "a(k)",
            invert_y: false,
        };
        let s = line_plot(&plot, &[(1.0, 0.5), (2.0, 1.0)]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt;b&gt;"));
        let sc = scatter_plot(&plot, &[(0.1, 0.2, "x".into())]);
        assert!(sc.contains("<circle"));
    }

    #[test]
    fn inverted_axis_puts_large_values_low() {
        let f = Frame::fit(&[(0.0, 0.0), (1.0, 1.0)], true);
        assert!(f.py(1.0) > f.py(0.0));
        let g = Frame::fit(&[(0.0, 0.0), (1.0, 1.0)], false);
        assert!(g.py(1.0) < g.py(0.0));
    }
}
