//! Tidy CSV and static SVG output for performance and adoption curves.

use std::fmt::Write as _;

use crate::sweep::Curve;

/// One row per year per curve: `year,series,value,unit`.
pub fn tidy_csv(curves: &[Curve]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["year", "series", "value", "unit"]).expect("in-memory write");
    for curve in curves {
        for (year, value) in curve.series.iter() {
            w.write_record([
                year.to_string().as_str(),
                curve.name.as_str(),
                value.to_string().as_str(),
                curve.series.unit().as_str(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Clone, Copy)]
enum Scale {
    Linear,
    Log10,
}

impl Scale {
    fn apply(self, v: f64) -> Option<f64> {
        match self {
            Scale::Linear => Some(v),
            Scale::Log10 if v > 0.0 => Some(v.log10()),
            Scale::Log10 => None,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn panel(out: &mut String, curves: &[Curve], title: &str, scale: Scale, top: f64) {
    let points: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            c.series
                .iter()
                .filter_map(|(y, v)| scale.apply(v).map(|v| (f64::from(y), v)))
                .collect()
        })
        .collect();
    let all = points.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if let Scale::Linear = scale {
        y0 = y0.min(0.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| top + MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" font-family="sans-serif">{}</text>"#,
        MARGIN_LEFT,
        top + 20.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        MARGIN_LEFT,
        top + MARGIN_TOP,
        plot_w,
        plot_h
    );
    // x ticks every five years
    let mut year = (x0 / 5.0).ceil() * 5.0;
    while year <= x1 {
        let x = px(year);
        let base = top + MARGIN_TOP + plot_h;
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{base:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/><text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle" font-family="sans-serif">{year}</text>"##,
            base + 4.0,
            base + 16.0
        );
        year += 5.0;
    }
    let ticks: Vec<f64> = match scale {
        Scale::Log10 => (y0.floor() as i32..=y1.ceil() as i32).map(f64::from).filter(|t| *t >= y0 && *t <= y1).collect(),
        Scale::Linear => (0..=4).map(|i| y0 + (y1 - y0) * f64::from(i) / 4.0).collect(),
    };
    for t in ticks {
        let y = py(t);
        let label = match scale {
            Scale::Log10 => format!("1e{t}"),
            Scale::Linear => format!("{t:.2}"),
        };
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#444"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end" font-family="sans-serif">{label}</text>"##,
            MARGIN_LEFT - 4.0,
            MARGIN_LEFT,
            MARGIN_LEFT - 6.0,
            y + 3.0
        );
    }
    for (i, (curve, pts)) in curves.iter().zip(&points).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = top + MARGIN_TOP + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{color}" font-family="sans-serif">{} ({})</text>"#,
            MARGIN_LEFT + 8.0,
            escape(&curve.name),
            curve.series.unit()
        );
    }
}

/// Two stacked panels: performance on a log scale, adoption share on a
/// linear scale.
pub fn svg(performance: &[Curve], adoption: &[Curve]) -> String {
    let height = PANEL_HEIGHT * 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    panel(&mut out, performance, "Distribution performance (log scale)", Scale::Log10, 0.0);
    panel(&mut out, adoption, "Internet adoption share", Scale::Linear, PANEL_HEIGHT);
    out.push_str("</svg>\n");
    out
}
