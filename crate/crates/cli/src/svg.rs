//! Minimal self-contained SVG 1.1 line charts: stacked panels sharing an x
//! axis, one polyline per series, dashed horizontal reference lines.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 260.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const GAP: f64 = 60.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
    pub references: Vec<(String, f64)>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub panels: Vec<Panel>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e6) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{v:.2e}")
    }
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

fn padded(range: Option<(f64, f64)>) -> (f64, f64) {
    match range {
        None => (0.0, 1.0),
        Some((lo, hi)) if lo == hi => (lo - 0.5 * lo.abs().max(1e-3), hi + 0.5 * hi.abs().max(1e-3)),
        Some((lo, hi)) => {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    }
}

impl Chart {
    pub fn render(&self) -> String {
        let height = TOP + self.panels.len() as f64 * (PANEL_HEIGHT + GAP) - GAP + BOTTOM;
        let plot_w = WIDTH - LEFT - RIGHT;
        let (x0, x1) = padded(finite_range(
            self.panels
                .iter()
                .flat_map(|p| p.series.iter())
                .flat_map(|s| s.points.iter().map(|p| p.0)),
        ));
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">
<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>
<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        let mut color = 0;
        for (i, panel) in self.panels.iter().enumerate() {
            let top = TOP + i as f64 * (PANEL_HEIGHT + GAP);
            let bottom = top + PANEL_HEIGHT;
            let (y0, y1) = padded(finite_range(
                panel
                    .series
                    .iter()
                    .flat_map(|s| s.points.iter().map(|p| p.1))
                    .chain(panel.references.iter().map(|r| r.1)),
            ));
            let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * PANEL_HEIGHT;
            let _ = writeln!(
                out,
                r##"<rect x="{LEFT}" y="{top}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="#333"/>"##
            );
            for t in 0..TICKS {
                let f = t as f64 / (TICKS - 1) as f64;
                let xv = x0 + f * (x1 - x0);
                let yv = y0 + f * (y1 - y0);
                let (px, py) = (sx(xv), sy(yv));
                let _ = writeln!(
                    out,
                    r##"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                    bottom + 4.0,
                    bottom + 16.0,
                    tick_label(xv)
                );
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                    LEFT - 4.0,
                    LEFT - 6.0,
                    py + 4.0,
                    tick_label(yv)
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
                top + PANEL_HEIGHT / 2.0,
                top + PANEL_HEIGHT / 2.0,
                escape(&panel.y_label)
            );
            let mut legend_y = top + 12.0;
            for (name, value) in &panel.references {
                let py = sy(*value);
                let _ = writeln!(
                    out,
                    r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#777" stroke-dasharray="6 4"/>"##,
                    LEFT + plot_w
                );
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="#777" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text>"##,
                    WIDTH - RIGHT + 10.0,
                    WIDTH - RIGHT + 34.0,
                    WIDTH - RIGHT + 40.0,
                    legend_y + 4.0,
                    escape(name)
                );
                legend_y += 16.0;
            }
            for s in &panel.series {
                let c = COLORS[color % COLORS.len()];
                color += 1;
                for segment in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
                    if segment.is_empty() {
                        continue;
                    }
                    let pts: Vec<String> = segment
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{c}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                    WIDTH - RIGHT + 10.0,
                    WIDTH - RIGHT + 34.0,
                    WIDTH - RIGHT + 40.0,
                    legend_y + 4.0,
                    escape(&s.name)
                );
                legend_y += 16.0;
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>
</svg>"#,
            LEFT + plot_w / 2.0,
            height - 12.0,
            escape(&self.x_label)
        );
        out
    }
}
