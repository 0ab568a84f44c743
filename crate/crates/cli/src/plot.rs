//! Line charts of annual series as self-contained SVG text.

use std::fmt::Write as _;

use thiserror::Error;
use vecmkit_core::series::{Dataset, Series};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no variables to plot")]
    NoVariables,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Pads a degenerate or tight range so every series sits inside the frame.
fn value_range(series: &[&Series]) -> (f64, f64) {
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.values())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn tick_label(v: f64, span: f64) -> String {
    let decimals = if span >= 100.0 {
        0
    } else if span >= 1.0 {
        2
    } else {
        4
    };
    format!("{v:.decimals$}")
}

/// One polyline per variable (a marker for single observations), years on
/// the x axis and a legend to the right.
pub fn plot_trends(d: &Dataset, variables: &[&str]) -> Result<String, PlotError> {
    if variables.is_empty() {
        return Err(PlotError::NoVariables);
    }
    let series: Vec<&Series> = variables
        .iter()
        .map(|name| d.get(name).ok_or_else(|| PlotError::UnknownVariable(name.to_string())))
        .collect::<Result<_, _>>()?;
    let (y_lo, y_hi) = value_range(&series);
    let (x_lo, x_hi) = (d.start_year() as f64, d.end_year() as f64);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |year: f64| -> f64 {
        if x_hi > x_lo {
            LEFT + (year - x_lo) / (x_hi - x_lo) * plot_w
        } else {
            LEFT + plot_w / 2.0
        }
    };
    let sy = |v: f64| -> f64 { TOP + (y_hi - v) / (y_hi - y_lo) * plot_h };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = format!("Graph of {}", variables.join(" and "));
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&title)
    );

    // Axes and ticks.
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );
    let n_years = d.len();
    let step = n_years.div_ceil(10).max(1);
    for i in (0..n_years).step_by(step) {
        let year = d.start_year() + i as i32;
        let x = sx(year as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{year}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
    }
    for i in 0..=5 {
        let v = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#444"/><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT + plot_w,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v, y_hi - y_lo)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Year</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    // Series and legend.
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let name = escape(s.name());
        if s.len() == 1 {
            let _ = writeln!(
                svg,
                r#"<circle class="series" data-name="{name}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                sx(s.start_year() as f64),
                sy(s.values()[0])
            );
        } else {
            let points: Vec<String> = s
                .years()
                .zip(s.values())
                .map(|(year, &v)| format!("{:.2},{:.2}", sx(year as f64), sy(v)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="series" data-name="{name}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                points.join(" ")
            );
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
