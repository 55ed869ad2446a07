use std::fmt::Write;

use super::{interpolate_success_contour, PhaseGrid, SweepResult, SweepRow};
use crate::solver::Algorithm;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ =
        writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, xlabel: &str, ylabel: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 - f * (y0 - y1);
        let _ = writeln!(
            out,
            r#"<text x="{px}" y="{}" text-anchor="middle">{:.3}</text>"#,
            y0 + 16.0,
            xr.0 + f * (xr.1 - xr.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#,
            x0 - 4.0,
            py + 4.0,
            yr.0 + f * (yr.1 - yr.0)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Line plot of `metric` against the sweep axis, one line per solver.
pub fn sweep_svg(result: &SweepResult, metric: fn(&SweepRow) -> f64, ylabel: &str) -> String {
    let mut algos: Vec<Algorithm> = Vec::new();
    for r in &result.rows {
        if !algos.contains(&r.algo) {
            algos.push(r.algo);
        }
    }
    let xr = range(result.axis_values.iter().copied());
    let yr = range(result.rows.iter().map(metric));
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);
    let mut out = String::new();
    header(&mut out, &format!("{} sweep", result.kind));
    axes(&mut out, &result.axis, ylabel, xr, yr);
    for (i, &algo) in algos.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = result
            .rows_for(algo)
            .iter()
            .filter(|r| metric(r).is_finite())
            .map(|r| format!("{:.2},{:.2}", px(r.axis_value), py(metric(r))))
            .collect();
        let _ =
            writeln!(out, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, pts.join(" "));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{algo}</text>"#,
            W - MARGIN + 4.0,
            MARGIN + 16.0 * i as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Grey-scale success-rate map over (δ, ρ) with the `level` contour overlaid.
pub fn phase_svg(grid: &PhaseGrid, level: f64) -> String {
    let mut out = String::new();
    header(&mut out, &format!("{} success rate, n = {}", grid.algo, grid.n));
    axes(&mut out, "delta = d/n", "rho = k/n", (0.0, 1.0), (0.0, 1.0));
    let span = W - 2.0 * MARGIN;
    let vspan = H - 2.0 * MARGIN;
    let edges = |v: &[f64], i: usize| -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { 0.5 * (v[i - 1] + v[i]) };
        let hi = if i + 1 == v.len() { 1.0 } else { 0.5 * (v[i] + v[i + 1]) };
        (lo, hi)
    };
    for (i, row) in grid.success_rate.iter().enumerate() {
        let (r0, r1) = edges(&grid.rho_values, i);
        for (j, &rate) in row.iter().enumerate() {
            let (d0, d1) = edges(&grid.delta_values, j);
            let shade = (255.0 * (1.0 - rate)).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{shade:02x}{shade:02x}{shade:02x}"/>"##,
                MARGIN + d0 * span,
                H - MARGIN - r1 * vspan,
                (d1 - d0) * span,
                (r1 - r0) * vspan
            );
        }
    }
    if let Ok(contour) = interpolate_success_contour(grid, level) {
        let pts: Vec<String> =
            contour.iter().map(|(d, r)| format!("{:.2},{:.2}", MARGIN + d * span, H - MARGIN - r * vspan)).collect();
        let _ = writeln!(out, r#"<polyline points="{}" stroke="red" fill="none" stroke-width="2"/>"#, pts.join(" "));
    }
    out.push_str("</svg>\n");
    out
}
