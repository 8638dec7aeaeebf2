//! CSV, JSON and SVG emitters.

use std::fmt::Write as _;
use std::path::Path;

use dht_core::simulator::ErrorEstimate;
use dht_core::ExponentPair;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Bits,
    Nats,
}

impl Unit {
    pub fn name(self) -> &'static str {
        match self {
            Unit::Bits => "bits",
            Unit::Nats => "nats",
        }
    }

    /// Expresses a value given in nats in this unit.
    pub fn express(self, v: f64) -> f64 {
        match self {
            Unit::Bits => v / std::f64::consts::LN_2,
            Unit::Nats => v,
        }
    }

    /// Converts a value in this unit to nats.
    pub fn to_nats(self, v: f64) -> f64 {
        match self {
            Unit::Bits => v * std::f64::consts::LN_2,
            Unit::Nats => v,
        }
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Converts to `unit` and sorts ascending in θ1.
pub fn frontier_in(points: &[ExponentPair<f64>], unit: Unit) -> Vec<ExponentPair<f64>> {
    let mut pts: Vec<_> =
        points.iter().map(|p| ExponentPair::new(unit.express(p.theta1), unit.express(p.theta2))).collect();
    pts.sort_by(|a, b| a.theta1.total_cmp(&b.theta1).then(a.theta2.total_cmp(&b.theta2)));
    pts
}

pub fn region_csv(points: &[ExponentPair<f64>], unit: Unit) -> String {
    let mut out = String::from("theta1,theta2,unit\n");
    for p in points {
        writeln!(out, "{},{},{}", p.theta1, p.theta2, unit.name()).unwrap();
    }
    out
}

pub const SIMULATION_HEADER: &str =
    "n,alpha1,beta1,alpha2,beta2,exp_beta1,exp_beta2,method,ci95_alpha1,ci95_beta1,ci95_alpha2,ci95_beta2";

pub fn simulation_csv(rows: &[ErrorEstimate], unit: Unit) -> String {
    let mut out = format!("{SIMULATION_HEADER}\n");
    for e in rows {
        let method = e.method.name();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{method},{},{},{},{}",
            e.n,
            e.alpha1,
            e.beta1,
            e.alpha2,
            e.beta2,
            unit.express(e.exp_beta1),
            unit.express(e.exp_beta2),
            e.ci95[0],
            e.ci95[1],
            e.ci95[2],
            e.ci95[3],
        )
        .unwrap();
    }
    out
}

/// Self-contained SVG: axes with end labels, the frontier as a staircase
/// polyline (the region is a union of rectangles), and a marker per corner.
pub fn region_svg(points: &[ExponentPair<f64>], unit: Unit, title: &str) -> String {
    const W: f64 = 480.0;
    const H: f64 = 400.0;
    const M: f64 = 56.0;
    let max1 = points.iter().map(|p| p.theta1).fold(0.0, f64::max);
    let max2 = points.iter().map(|p| p.theta2).fold(0.0, f64::max);
    let (s1, s2) = (if max1 > 0.0 { max1 * 1.1 } else { 1.0 }, if max2 > 0.0 { max2 * 1.1 } else { 1.0 });
    let px = |t: f64| M + t / s1 * (W - 2.0 * M);
    let py = |t: f64| H - M - t / s2 * (H - 2.0 * M);

    let mut path = vec![(0.0, points.first().map_or(0.0, |p| p.theta2))];
    for (i, p) in points.iter().enumerate() {
        path.push((p.theta1, p.theta2));
        let next = points.get(i + 1).map_or(0.0, |q| q.theta2);
        path.push((p.theta1, next));
    }
    let poly: Vec<String> = path.iter().map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b))).collect();

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)
        .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<path d="M{m},{top} L{m},{b} L{r},{b}" fill="none" stroke="black"/>"#,
        m = M,
        top = M,
        b = H - M,
        r = W - M
    )
    .unwrap();
    let label = |svg: &mut String, x: f64, y: f64, anchor: &str, text: &str| {
        writeln!(svg, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{text}</text>"#).unwrap();
    };
    label(&mut svg, W / 2.0, H - 14.0, "middle", &format!("θ1 [{}]", unit.name()));
    label(&mut svg, 14.0, M - 10.0, "start", &format!("θ2 [{}]", unit.name()));
    label(&mut svg, M, H - M + 16.0, "middle", "0");
    label(&mut svg, px(max1), H - M + 16.0, "middle", &format!("{max1:.4}"));
    label(&mut svg, M - 6.0, py(max2) + 4.0, "end", &format!("{max2:.4}"));
    writeln!(svg, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, poly.join(" "))
        .unwrap();
    for p in points {
        writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="crimson"/>"#, px(p.theta1), py(p.theta2)).unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
