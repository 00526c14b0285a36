//! Minimal SVG 1.1 output.
//!
//! Coordinates are printed in user units with three decimals, so documents
//! are byte-identical whenever the plotted values agree to that resolution.

use std::fmt::Write;

use serde_json::json;

use crate::report::{sha256_hex, RunConfig};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub side: f64,
    pub fill: &'static str,
    pub opacity: f64,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Wraps a drawing with its metadata block. The digest covers the drawing.
fn document(width: f64, height: f64, config: &RunConfig, drawing: &str) -> String {
    let meta = json!({ "config": config, "content_sha256": sha256_hex(drawing.as_bytes()) });
    let meta = serde_json::to_string(&meta).expect("metadata serializes");
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <metadata><![CDATA[{meta}]]></metadata>\n{drawing}</svg>\n"
    )
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Line chart of one or more series sharing both axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], config: &RunConfig) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut d = String::new();
    let _ = writeln!(d, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        d,
        "<text x=\"{:.3}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        d,
        "<path d=\"M{left:.3} {top:.3} L{left:.3} {bottom:.3} L{right:.3} {bottom:.3}\" stroke=\"black\" fill=\"none\"/>"
    );
    for t in nice_ticks(x0, x1, 8) {
        let x = sx(t);
        let _ = writeln!(
            d,
            "<line x1=\"{x:.3}\" y1=\"{bottom:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"black\"/><text x=\"{x:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{t}</text>",
            bottom + 5.0,
            bottom + 18.0
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(
            d,
            "<line x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{left:.3}\" y2=\"{y:.3}\" stroke=\"black\"/><text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{t}</text>",
            left - 5.0,
            left - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        d,
        "<text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        d,
        "<text x=\"18\" y=\"{:.3}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {:.3})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let mut path = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(path, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, sx(x), sy(y));
        }
        let _ = writeln!(
            d,
            "<path d=\"{}\" stroke=\"{}\" stroke-width=\"1.5\" fill=\"none\"><title>{}</title></path>",
            path.trim_end(),
            s.color,
            escape(s.name)
        );
        let ly = top + 15.0 + 18.0 * k as f64;
        let _ = writeln!(
            d,
            "<line x1=\"{:.3}\" y1=\"{ly:.3}\" x2=\"{:.3}\" y2=\"{ly:.3}\" stroke=\"{}\" stroke-width=\"2\"/><text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            right - 110.0,
            right - 85.0,
            s.color,
            right - 80.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    document(WIDTH, HEIGHT, config, &d)
}

/// Squares in the plane, drawn over the window `[lo, hi]²` with `y` pointing up.
pub fn squares(title: &str, rects: &[Rect], lo: f64, hi: f64, config: &RunConfig) -> String {
    let size = 600.0;
    let scale = size / (hi - lo);
    let mut d = String::new();
    let _ = writeln!(d, "<rect x=\"0\" y=\"0\" width=\"{size}\" height=\"{size}\" fill=\"white\"><title>{}</title></rect>", escape(title));
    let unit0 = (0.0 - lo) * scale;
    let _ = writeln!(
        d,
        "<rect x=\"{unit0:.3}\" y=\"{:.3}\" width=\"{scale:.3}\" height=\"{scale:.3}\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>",
        size - (1.0 - lo) * scale
    );
    for r in rects {
        let _ = writeln!(
            d,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{}\" fill-opacity=\"{}\"/>",
            (r.x - lo) * scale,
            size - (r.y + r.side - lo) * scale,
            r.side * scale,
            r.side * scale,
            r.fill,
            r.opacity
        );
    }
    document(size, size, config, &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_range() {
        let t = nice_ticks(2.0, 30.0, 8);
        assert_eq!(t.first(), Some(&5.0));
        assert_eq!(t.last(), Some(&30.0));
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & c>"), "a&lt;b &amp; c&gt;");
    }
}
