//! Minimal SVG line charts of metrics against prediction window, one panel
//! per metric and one line per room.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::metrics::MetricsReport;

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

type Getter = fn(&MetricsReport) -> Option<f64>;

pub fn metrics_svg(reports: &[MetricsReport]) -> String {
    let mut windows: Vec<u32> = reports.iter().map(|r| r.window_minutes).collect();
    windows.sort_unstable();
    windows.dedup();
    let mut rooms: BTreeMap<&str, Vec<&MetricsReport>> = BTreeMap::new();
    for r in reports {
        rooms.entry(r.room_id.as_str()).or_default().push(r);
    }

    let panels: [(&str, Getter); 3] = [
        ("Binary cross-entropy", |r| Some(r.bce)),
        ("AUROC", |r| r.auroc),
        ("Average precision", |r| r.average_precision),
    ];
    let width = 3.0 * (PANEL_W + MARGIN) + MARGIN;
    let height = PANEL_H + 3.0 * MARGIN + 16.0 * rooms.len() as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    for (p, (title, get)) in panels.iter().enumerate() {
        let x0 = MARGIN + p as f64 * (PANEL_W + MARGIN);
        let y0 = MARGIN;
        let values: Vec<f64> = reports.iter().filter_map(get).collect();
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let sx = |i: usize| x0 + PANEL_W * (i as f64 + 0.5) / windows.len().max(1) as f64;
        let sy = |v: f64| y0 + PANEL_H * (1.0 - (v - lo) / (hi - lo));

        let _ = writeln!(
            svg,
            r##"<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{title}</text>"#,
            x0 + PANEL_W / 2.0,
            y0 - 10.0
        );
        for (i, w) in windows.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{w}</text>"#,
                sx(i),
                y0 + PANEL_H + 14.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{hi:.3}</text><text x="{}" y="{}" text-anchor="end">{lo:.3}</text>"#,
            x0 - 4.0,
            y0 + 4.0,
            x0 - 4.0,
            y0 + PANEL_H
        );
        for (k, rows) in rooms.values().enumerate() {
            let pts: Vec<String> = windows
                .iter()
                .enumerate()
                .filter_map(|(i, w)| {
                    let r = rows.iter().find(|r| r.window_minutes == *w)?;
                    get(r).map(|v| format!("{:.2},{:.2}", sx(i), sy(v)))
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                COLORS[k % COLORS.len()],
                pts.join(" ")
            );
        }
    }
    for (k, room) in rooms.keys().enumerate() {
        let y = PANEL_H + 2.0 * MARGIN + 16.0 * k as f64 + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{room}</text>"#,
            MARGIN + 20.0,
            COLORS[k % COLORS.len()],
            MARGIN + 26.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">prediction window (minutes)</text>"#,
        width / 2.0,
        PANEL_H + MARGIN + 30.0
    );
    svg.push_str("</svg>\n");
    svg
}
