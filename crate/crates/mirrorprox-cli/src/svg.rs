//! Hand-rolled SVG rendering of convergence traces: gap estimate against
//! iteration on a log-scale vertical axis, one curve per (trace, estimator)
//! plus a dashed rate-bound curve for every trace that recorded one.
//! Output bytes are deterministic for fixed inputs.

use crate::commands::stem;
use crate::trace::TraceFile;
use std::fmt::Write as _;
use std::path::PathBuf;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const ML: f64 = 80.0;
const MR: f64 = 270.0;
const MT: f64 = 30.0;
const MB: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
];

enum Style {
    Solid,
    Dotted,
    Dashed,
}

struct Series {
    label: String,
    color: &'static str,
    style: Style,
    /// (iteration, positive gap value); nonpositive values cannot be drawn
    /// on a log axis and are skipped.
    points: Vec<(f64, f64)>,
}

fn collect_series(files: &[(PathBuf, TraceFile)]) -> Vec<Series> {
    let mut series = Vec::new();
    for (fi, (path, file)) in files.iter().enumerate() {
        let color = PALETTE[fi % PALETTE.len()];
        let tag = format!("{} {}/{}", stem(path), file.meta.method, file.meta.mirror);
        for (estimator, style) in [("sampling", Style::Solid), ("grid", Style::Dotted)] {
            let points: Vec<(f64, f64)> = file
                .rows
                .iter()
                .filter(|r| r.gap_method == estimator && r.gap_estimate > 0.0)
                .map(|r| (r.iter as f64, r.gap_estimate))
                .collect();
            if !points.is_empty() {
                series.push(Series {
                    label: format!("{tag} {estimator}"),
                    color,
                    style,
                    points,
                });
            }
        }
        let mut bound_points: Vec<(f64, f64)> = file
            .rows
            .iter()
            .filter_map(|r| r.bound.filter(|&b| b > 0.0).map(|b| (r.iter as f64, b)))
            .collect();
        bound_points.dedup();
        if !bound_points.is_empty() {
            series.push(Series {
                label: format!("{tag} bound"),
                color,
                style: Style::Dashed,
                points: bound_points,
            });
        }
    }
    series
}

/// A tick step of the form {1, 2, 5} * 10^k that yields about six ticks.
fn nice_step(range: f64) -> f64 {
    let raw = (range / 6.0).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0] {
        if mult * mag >= raw {
            return mult * mag;
        }
    }
    10.0 * mag
}

pub fn render(files: &[(PathBuf, TraceFile)]) -> String {
    let series = collect_series(files);

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for s in &series {
        for &(x, v) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            v_min = v_min.min(v);
            v_max = v_max.max(v);
        }
    }
    let empty = series.is_empty();
    if empty {
        x_min = 0.0;
        x_max = 1.0;
        v_min = 0.1;
        v_max = 10.0;
    }
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let mut e_lo = v_min.log10().floor() as i64;
    let mut e_hi = v_max.log10().ceil() as i64;
    if e_lo == e_hi {
        e_hi += 1;
        e_lo -= 1;
    }

    let plot_w = WIDTH - ML - MR;
    let plot_h = HEIGHT - MT - MB;
    let sx = |x: f64| ML + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |v: f64| MT + (e_hi as f64 - v.log10()) / (e_hi - e_lo) as f64 * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // horizontal gridlines and y labels at powers of ten
    for e in e_lo..=e_hi {
        let y = sy(10f64.powi(e as i32));
        let _ = writeln!(
            out,
            "  <line x1=\"{ML}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            ML + plot_w
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#333333\">1e{e}</text>",
            ML - 8.0,
            y + 4.0
        );
    }
    // vertical gridlines and x labels
    let step = nice_step(x_max - x_min);
    let mut tick = (x_min / step).ceil() * step;
    while tick <= x_max + 1e-9 {
        let x = sx(tick);
        let _ = writeln!(
            out,
            "  <line x1=\"{x:.2}\" y1=\"{MT}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
            MT + plot_h
        );
        let _ = writeln!(
            out,
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">{tick}</text>",
            MT + plot_h + 18.0
        );
        tick += step;
    }
    // axes
    let _ = writeln!(
        out,
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.2}\" stroke=\"#333333\"/>",
        MT + plot_h
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{ML}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>",
        MT + plot_h,
        ML + plot_w,
        MT + plot_h
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">iteration</text>",
        ML + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        "  <text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\" transform=\"rotate(-90 20 {:.2})\">dual gap estimate</text>",
        MT + plot_h / 2.0,
        MT + plot_h / 2.0
    );

    if empty {
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">no positive gap values to plot</text>",
            ML + plot_w / 2.0,
            MT + plot_h / 2.0
        );
    }

    for s in &series {
        let dash = match s.style {
            Style::Solid => "",
            Style::Dotted => " stroke-dasharray=\"2 4\"",
            Style::Dashed => " stroke-dasharray=\"8 4\"",
        };
        if s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, v)| format!("{:.2},{:.2}", sx(x), sy(v)))
                .collect();
            let _ = writeln!(
                out,
                "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>",
                s.color,
                pts.join(" ")
            );
        }
        for &(x, v) in &s.points {
            let _ = writeln!(
                out,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.2\" fill=\"{}\"/>",
                sx(x),
                sy(v),
                s.color
            );
        }
    }

    // legend
    let lx = WIDTH - MR + 15.0;
    let mut ly = MT + 10.0;
    for s in &series {
        let dash = match s.style {
            Style::Solid => "",
            Style::Dotted => " stroke-dasharray=\"2 4\"",
            Style::Dashed => " stroke-dasharray=\"8 4\"",
        };
        let _ = writeln!(
            out,
            "  <line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            ly - 4.0,
            lx + 26.0,
            ly - 4.0,
            s.color
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{ly:.2}\" fill=\"#333333\">{}</text>",
            lx + 34.0,
            s.label
        );
        ly += 18.0;
    }

    out.push_str("</svg>\n");
    out
}
