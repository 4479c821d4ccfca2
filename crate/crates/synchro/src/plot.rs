//! Minimal self-contained SVG phase-plane plots.

use std::fmt::Write as _;

pub const CONTRACTIVE: &str = "#2ca02c";
pub const EXPANSIVE: &str = "#d62728";
pub const SECTION_FILL: &str = "#ffe14d";

/// Distinct colors for per-pair markers.
pub const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Dot,
    Cross,
    Ring,
}

#[derive(Debug, Clone)]
enum Item {
    Line { points: Vec<[f64; 2]>, color: String, width: f64 },
    Polygon { points: Vec<[f64; 2]>, stroke: String, fill: String },
    Mark { at: [f64; 2], color: String, shape: Marker, size: f64 },
}

#[derive(Debug, Clone)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    width: f64,
    height: f64,
    items: Vec<Item>,
    legend: Vec<(String, String)>,
}

const MARGIN: f64 = 60.0;
// room for long tick labels on narrow ranges
const LEFT: f64 = 100.0;

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            width: 640.0,
            height: 480.0,
            items: Vec::new(),
            legend: Vec::new(),
        }
    }

    pub fn line(&mut self, points: Vec<[f64; 2]>, color: &str, width: f64) {
        if points.len() >= 2 {
            self.items.push(Item::Line { points, color: color.to_string(), width });
        }
    }

    pub fn polygon(&mut self, points: Vec<[f64; 2]>, stroke: &str, fill: &str) {
        self.items.push(Item::Polygon { points, stroke: stroke.to_string(), fill: fill.to_string() });
    }

    pub fn mark(&mut self, at: [f64; 2], color: &str, shape: Marker, size: f64) {
        self.items.push(Item::Mark { at, color: color.to_string(), shape, size });
    }

    pub fn legend(&mut self, label: &str, color: &str) {
        self.legend.push((label.to_string(), color.to_string()));
    }

    /// Colored polyline: consecutive points sharing a color are merged.
    pub fn colored_path(&mut self, points: &[[f64; 2]], colors: &[&str], width: f64) {
        let mut start = 0;
        for i in 1..=points.len() {
            if i == points.len() || colors[i] != colors[start] {
                // overlap by one point so runs join up
                let end = i.min(points.len() - 1);
                self.line(points[start..=end].to_vec(), colors[start], width);
                start = i;
            }
        }
    }

    fn bounds(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        let mut add = |p: &[f64; 2]| {
            b = [b[0].min(p[0]), b[1].max(p[0]), b[2].min(p[1]), b[3].max(p[1])];
        };
        for it in &self.items {
            match it {
                Item::Line { points, .. } | Item::Polygon { points, .. } => points.iter().for_each(&mut add),
                Item::Mark { at, .. } => add(at),
            }
        }
        if !b[0].is_finite() {
            return [0.0, 1.0, 0.0, 1.0];
        }
        for (lo, hi) in [(0, 1), (2, 3)] {
            let pad = 0.05 * (b[hi] - b[lo]).max(1e-12 * b[lo].abs().max(1.0));
            b[lo] -= pad;
            b[hi] += pad;
        }
        b
    }

    pub fn render(&self) -> String {
        let [x0, x1, y0, y1] = self.bounds();
        let (w, h) = (self.width, self.height);
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (w - LEFT - MARGIN);
        let sy = |y: f64| h - MARGIN - (y - y0) / (y1 - y0) * (h - 2.0 * MARGIN);
        let pts = |p: &[[f64; 2]]| p.iter().map(|q| format!("{:.2},{:.2}", sx(q[0]), sy(q[1]))).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, esc(&self.title));
        let (l, r, t, b) = (LEFT, w - MARGIN, MARGIN, h - MARGIN);
        let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                sx(xv),
                b + 16.0,
                tick(xv, x1 - x0)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                l - 4.0,
                sy(yv) + 4.0,
                tick(yv, y1 - y0)
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 14.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            esc(&self.y_label)
        );
        for it in &self.items {
            match it {
                Item::Line { points, color, width } => {
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
                        pts(points)
                    );
                }
                Item::Polygon { points, stroke, fill } => {
                    let _ = writeln!(
                        s,
                        r#"<polygon points="{}" fill="{fill}" fill-opacity="0.6" stroke="{stroke}"/>"#,
                        pts(points)
                    );
                }
                Item::Mark { at, color, shape, size } => {
                    let (cx, cy) = (sx(at[0]), sy(at[1]));
                    match shape {
                        Marker::Dot => {
                            let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{size}" fill="{color}"/>"#);
                        }
                        Marker::Ring => {
                            let _ = writeln!(
                                s,
                                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{size}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
                            );
                        }
                        Marker::Cross => {
                            let _ = writeln!(
                                s,
                                r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                                cx - size,
                                cy - size,
                                cx + size,
                                cy + size,
                                cx - size,
                                cy + size,
                                cx + size,
                                cy - size
                            );
                        }
                    }
                }
            }
        }
        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = t + 14.0 + 14.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, r - 150.0, y - 9.0);
            let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, r - 135.0, esc(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64, span: f64) -> String {
    // enough digits to tell neighbouring ticks apart
    let digits = (-(span / 4.0).log10()).ceil().clamp(0.0, 12.0) as usize + 1;
    format!("{v:.digits$}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
