//! Schematic SVG: polylines and axes in a fixed 1000x1000 viewport.

use std::fmt::Write;

const SIZE: f64 = 1000.0;
const MARGIN: f64 = 40.0;

#[derive(Debug, Default, Clone)]
pub struct Figure {
    lines: Vec<(Vec<(f64, f64)>, &'static str)>,
}

impl Figure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn polyline(&mut self, points: Vec<(f64, f64)>, color: &'static str) {
        let points: Vec<(f64, f64)> = points.into_iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        if points.len() >= 2 {
            self.lines.push((points, color));
        }
    }

    pub fn render(&self) -> String {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (pts, _) in &self.lines {
            for &(x, y) in pts {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        // equal scale on both axes
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        let map = |x: f64, y: f64| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale);

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n",
        );
        out.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n");
        // axes through the origin when it is in view, otherwise along the frame
        let (ox, oy) = map(0.0_f64.clamp(cx - span / 2.0, cx + span / 2.0), 0.0_f64.clamp(cy - span / 2.0, cy + span / 2.0));
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{oy:.2}\" x2=\"{:.2}\" y2=\"{oy:.2}\" stroke=\"gray\" stroke-width=\"1\"/>",
            MARGIN,
            SIZE - MARGIN
        );
        let _ = writeln!(
            out,
            "<line x1=\"{ox:.2}\" y1=\"{:.2}\" x2=\"{ox:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-width=\"1\"/>",
            MARGIN,
            SIZE - MARGIN
        );
        for (pts, color) in &self.lines {
            out.push_str("<polyline fill=\"none\" stroke=\"");
            out.push_str(color);
            out.push_str("\" stroke-width=\"1\" points=\"");
            for (i, &(x, y)) in pts.iter().enumerate() {
                let (px, py) = map(x, y);
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{px:.2},{py:.2}");
            }
            out.push_str("\"/>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}
