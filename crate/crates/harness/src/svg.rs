//! Minimal SVG line charts for reports.

use std::fmt::Write as _;

use crate::report::{PlotSpec, Report};

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Line {
    label: String,
    points: Vec<(f64, f64)>,
}

fn collect_lines(report: &Report, spec: &PlotSpec) -> Vec<Line> {
    let Some(xi) = report.column(&spec.x) else {
        return Vec::new();
    };
    let si: Vec<usize> = spec.series.iter().filter_map(|s| report.column(s)).collect();
    let mut lines: Vec<Line> = Vec::new();
    for r in &report.rows {
        if !spec.metrics.contains(&r.metric) {
            continue;
        }
        let (Some(x), Some(y)) = (r.coords[xi].as_f64(), r.value.mean()) else {
            continue;
        };
        if !y.is_finite() || (spec.log_x && x <= 0.0) {
            continue;
        }
        let mut parts: Vec<String> = si.iter().map(|&i| format!("{}={}", report.columns[i], r.coords[i])).collect();
        if spec.metrics.len() > 1 {
            parts.push(r.metric.clone());
        }
        let label = if parts.is_empty() { r.metric.clone() } else { parts.join(" ") };
        match lines.iter_mut().find(|l| l.label == label) {
            Some(l) => l.points.push((x, y)),
            None => lines.push(Line { label, points: vec![(x, y)] }),
        }
    }
    for l in &mut lines {
        l.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    lines
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1e4).round() / 1e4)
    }
}

/// Renders the report's plot, or `None` if it has no plot or no drawable points.
pub fn render(report: &Report) -> Option<String> {
    let spec = report.plot.as_ref()?;
    let lines = collect_lines(report, spec);
    let pts = lines.iter().flat_map(|l| l.points.iter());
    let tx = |x: f64| if spec.log_x { x.log10() } else { x };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(tx(x));
        x1 = x1.max(tx(x));
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return None;
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let pad = ((y1 - y0) * 0.05).max(1e-9);
    y0 -= pad;
    y1 += pad;

    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let gx = LEFT + f * pw;
        let xv = x0 + f * (x1 - x0);
        let xv = if spec.log_x { 10f64.powf(xv) } else { xv };
        let _ = writeln!(s, r##"<line x1="{gx:.2}" y1="{TOP}" x2="{gx:.2}" y2="{}" stroke="#ddd"/>"##, TOP + ph);
        let _ =
            writeln!(s, r#"<text x="{gx:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 16.0, tick_label(xv));
        let gy = TOP + f * ph;
        let yv = y1 - f * (y1 - y0);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{gy:.2}" x2="{}" y2="{gy:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ =
            writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, gy + 4.0, tick_label(yv));
    }
    let xlabel = if spec.log_x { format!("{} (log scale)", spec.x) } else { spec.x.clone() };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        escape(&xlabel)
    );

    for (k, line) in lines.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = line.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#, path.join(" "));
        if line.points.len() <= 60 {
            for &(x, y) in &line.points {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
            }
        }
        let ly = TOP + 12.0 + 16.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, escape(&line.label));
    }
    s.push_str("</svg>\n");
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Value;

    #[test]
    fn draws_one_polyline_per_series() {
        let mut r = Report::new(&["eta", "alpha"]);
        for eta in [0.9, 0.99] {
            for a in [0.1, 0.2, 0.3] {
                r.push(vec![eta.into(), a.into()], "total", Value::Exact(a * eta));
            }
        }
        r.plot = Some(PlotSpec {
            title: "t".into(),
            x: "alpha".into(),
            series: vec!["eta".into()],
            metrics: vec!["total".into()],
            log_x: false,
        });
        let svg = render(&r).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("eta=0.99"));
    }

    #[test]
    fn no_plot_without_spec() {
        assert!(render(&Report::new(&["x"])).is_none());
    }
}
