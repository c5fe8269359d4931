//! Minimal SVG line plots: axes, tick labels, polylines, and a legend.
//! These are evidence artifacts for eyeballing traces, not a charting
//! library.

use std::io::{self, Write};
use std::path::Path;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if xmin == xmax {
        xmax = xmin + 1.0;
    }
    if ymin == ymax {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    (xmin, xmax, ymin, ymax)
}

/// Writes an SVG line plot of the given series.
pub fn line_plot(path: &Path, title: &str, x_label: &str, series: &[Series]) -> io::Result<()> {
    assert!(!series.is_empty(), "no series to plot");
    let (xmin, xmax, ymin, ymax) = bounds(series);
    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - ymin) / (ymax - ymin) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" \
         stroke=\"black\"/>\n<line x1=\"{MARGIN_L}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" \
         stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R
    ));
    // Ticks.
    for k in 0..=5 {
        let fx = xmin + (xmax - xmin) * k as f64 / 5.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 5.0;
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n\
             <text x=\"{0}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{4:.3}</text>\n",
            px(fx),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0,
            HEIGHT - MARGIN_B + 20.0,
            fx
        ));
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n\
             <text x=\"{3}\" y=\"{4}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{5:.3}</text>\n",
            MARGIN_L - 5.0,
            py(fy),
            MARGIN_L,
            MARGIN_L - 8.0,
            py(fy) + 4.0,
            fy
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 10.0,
        x_label
    ));
    // Polylines (decimated to keep files small).
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let step = (s.points.len() / 2000).max(1);
        let pts: Vec<String> = s
            .points
            .iter()
            .step_by(step)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            color,
            pts.join(" ")
        ));
        // Legend entry.
        let ly = MARGIN_T + 16.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{ly}\" x2=\"{1}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n\
             <text x=\"{2}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"12\">{4}</text>\n",
            WIDTH - 170.0,
            WIDTH - 145.0,
            WIDTH - 140.0,
            ly + 4.0,
            s.label
        ));
    }
    out.push_str("</svg>\n");
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}
