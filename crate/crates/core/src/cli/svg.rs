//! Minimal standalone SVG charts: polylines on linear or log axes, and
//! grouped bars. Output is a pure function of the input.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub log_y: bool,
    pub groups: Vec<String>,
    /// One entry per bar within a group: label and one value per group.
    pub bars: Vec<(String, Vec<f64>)>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            lo -= pad;
            hi += pad;
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        (0..=4)
            .map(|k| {
                let t = self.lo + (self.hi - self.lo) * k as f64 / 4.0;
                let label = if self.log { fmt_num(10f64.powf(t)) } else { fmt_num(t) };
                (k as f64 / 4.0, label)
            })
            .collect()
    }
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn px(u: f64) -> f64 {
    LEFT + u * (W - LEFT - RIGHT)
}

fn py(u: f64) -> f64 {
    H - BOTTOM - u * (H - TOP - BOTTOM)
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn y_ticks(out: &mut String, axis: &Axis) {
    for (u, label) in axis.ticks() {
        let y = py(u);
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            y + 4.0
        );
    }
}

fn legend(out: &mut String, labels: impl Iterator<Item = String>) {
    for (i, label) in labels.enumerate() {
        let y = TOP + 10.0 + 16.0 * i as f64;
        let x = W - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 8.0,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            y + 1.0,
            escape(&label)
        );
    }
}

impl LineChart {
    pub fn render(&self) -> String {
        let xs = Axis::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.log_x);
        let ys = Axis::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), self.log_y);
        let mut out = String::new();
        frame(&mut out, &self.title, &self.x_label, &self.y_label);
        for (u, label) in xs.ticks() {
            let x = px(u);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                H - BOTTOM,
                H - BOTTOM + 4.0,
                H - BOTTOM + 16.0
            );
        }
        y_ticks(&mut out, &ys);
        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter_map(|&(x, y)| Some((px(xs.unit(x)?), py(ys.unit(y)?))))
                .collect();
            if pts.len() > 1 {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            for (x, y) in &pts {
                let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#);
            }
        }
        legend(&mut out, self.series.iter().map(|s| s.label.clone()));
        out.push_str("</svg>\n");
        out
    }
}

impl BarChart {
    pub fn render(&self) -> String {
        let mut ys = Axis::fit(self.bars.iter().flat_map(|b| b.1.iter().copied()), self.log_y);
        if !self.log_y {
            ys.lo = ys.lo.min(0.0);
        }
        let mut out = String::new();
        frame(&mut out, &self.title, "", &self.y_label);
        y_ticks(&mut out, &ys);
        let groups = self.groups.len().max(1) as f64;
        let per = self.bars.len().max(1) as f64;
        let slot = 1.0 / groups;
        let base = if self.log_y { 0.0 } else { ys.unit(0.0).unwrap_or(0.0) };
        for (g, name) in self.groups.iter().enumerate() {
            let left = g as f64 * slot;
            for (b, (_, values)) in self.bars.iter().enumerate() {
                let Some(u) = values.get(g).and_then(|&v| ys.unit(v)) else {
                    continue;
                };
                let x0 = px(left + slot * (0.1 + 0.8 * b as f64 / per));
                let x1 = px(left + slot * (0.1 + 0.8 * (b as f64 + 1.0) / per));
                let (top, bottom) = (py(u.max(base)), py(u.min(base)));
                let _ = writeln!(
                    out,
                    r#"<rect x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    x1 - x0,
                    bottom - top,
                    PALETTE[b % PALETTE.len()]
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" transform="rotate(-30 {:.1} {:.1})" font-size="9">{}</text>"#,
                px(left + slot / 2.0),
                H - BOTTOM + 12.0,
                px(left + slot / 2.0),
                H - BOTTOM + 12.0,
                escape(name)
            );
        }
        legend(&mut out, self.bars.iter().map(|b| b.0.clone()));
        out.push_str("</svg>\n");
        out
    }
}
