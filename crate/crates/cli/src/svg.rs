//! Schematic SVG charts: axes, polylines, a few labels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sparsesense::evaluation::{Cell, ExperimentResult, Regime};

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn from_points<'a>(pts: impl Iterator<Item = &'a (f64, f64)>) -> Self {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for &(x, y) in pts {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            (f.x0, f.x1, f.y0, f.y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if f.x1 <= f.x0 {
            f.x1 = f.x0 + 1.0;
        }
        if f.y1 <= f.y0 {
            f.y1 = f.y0 + 1.0;
        }
        f.y0 = f.y0.min(0.0);
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#
    );
    let _ = writeln!(
        out,
        r#"<g font-family="sans-serif" font-size="11"><text x="{l}" y="{}" text-anchor="middle">{}</text><text x="{r}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{b}" text-anchor="end">{:.3}</text><text x="{}" y="{}" text-anchor="end">{:.3}</text></g>"#,
        b + 16.0,
        trim(f.x0),
        b + 16.0,
        trim(f.x1),
        l - 4.0,
        f.y0,
        l - 4.0,
        t + 4.0,
        f.y1
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn trim(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, label: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
        coords.join(" "),
        escape(label)
    );
}

/// Error against sensor count, one curve per mode count.
pub fn sweep_chart(result: &ExperimentResult) -> String {
    let mut families: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for c in &result.cells {
        if let Cell::Modes { r, p } = c.cell {
            families.entry(r).or_default().push((p as f64, c.stats.mean));
        }
    }
    for pts in families.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let frame = Frame::from_points(families.values().flatten());
    let mut out = String::new();
    open(&mut out, &format!("{} basis: error against sensors", result.basis.as_str()));
    axes(&mut out, &frame, "sensors p", "mean fractional error");
    for (i, (r, pts)) in families.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        polyline(&mut out, &frame, pts, color, &format!("r = {r}"));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">r = {r}</text>"#,
            W - MARGIN + 4.0,
            MARGIN + 14.0 * i as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn regime_color(regime: Option<Regime>) -> &'static str {
    match regime {
        Some(Regime::Cheap) => "#f4a6a6",
        Some(Regime::Expensive) => "#a6c4f4",
        Some(Regime::MixedBest) => "#c9a6f4",
        Some(Regime::Inconclusive) | None => "#ffffff",
    }
}

/// Error along the composition sweep, all-cheap (C) to all-expensive (E),
/// on a background colored by the regime.
pub fn mf_chart(result: &ExperimentResult) -> String {
    let pts: Vec<(f64, f64)> = result
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| (i as f64, c.stats.mean))
        .collect();
    let frame = Frame::from_points(pts.iter());
    let mut out = String::new();
    let label = result.regime.map(Regime::as_str).unwrap_or("inconclusive");
    open(&mut out, &format!("composition sweep: {label}"));
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="{}"/>"#,
        regime_color(result.regime)
    );
    axes(&mut out, &frame, "composition", "mean fractional error");
    polyline(&mut out, &frame, &pts, "black", label);
    let y = H - MARGIN + 32.0;
    let _ = writeln!(
        out,
        r#"<g font-family="sans-serif" font-size="16" font-weight="bold"><text x="{MARGIN}" y="{y}" text-anchor="middle">C</text><text x="{}" y="{y}" text-anchor="middle">E</text></g>"#,
        W - MARGIN
    );
    out.push_str("</svg>\n");
    out
}
