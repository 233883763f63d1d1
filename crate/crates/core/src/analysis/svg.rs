//! Presentation-only SVG emission: a mean line with a confidence band per
//! (measure, context) group, and bar charts for token-length histograms.

use super::{BinnedReport, GroupReport, LengthHistogram};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 52.0;

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Scale {
    fn x(&self, t: f64) -> f64 {
        MARGIN + (t - self.x0) / (self.x1 - self.x0).max(1e-9) * (WIDTH - 2.0 * MARGIN)
    }
    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN
            - (v - self.y0) / (self.y1 - self.y0).max(1e-9) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn axes(scale: &Scale, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN,
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN,
        MARGIN,
        MARGIN,
        MARGIN,
        HEIGHT - MARGIN,
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    ));
    // y ticks
    for i in 0..=4 {
        let v = scale.y0 + (scale.y1 - scale.y0) * f64::from(i) / 4.0;
        let y = scale.y(v);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#ccc\"/>\n\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{v:.2}</text>\n",
            MARGIN,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            y + 4.0,
        ));
    }
    s
}

/// Mean-with-CI-band line chart for one group of a binned report.
pub fn render_group_chart(report: &BinnedReport, group: &GroupReport) -> String {
    let points: Vec<(f64, f64, f64, f64)> = group
        .bins
        .iter()
        .flatten()
        .map(|b| (b.bin as f64, b.mean, b.ci_low, b.ci_high))
        .collect();
    let title = format!(
        "{} similarity vs token length ({} context)",
        group.measure,
        if group.with_context { "with" } else { "without" }
    );
    let mut svg = header(&title);
    if points.is_empty() {
        svg.push_str("<text x=\"320\" y=\"200\" text-anchor=\"middle\">no data</text>\n");
        svg.push_str("</svg>\n");
        return svg;
    }
    let y_min = points.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let y_max = points.iter().map(|p| p.3).fold(f64::NEG_INFINITY, f64::max);
    let pad = ((y_max - y_min) * 0.1).max(0.01);
    let scale = Scale {
        x0: 1.0,
        x1: (report.max_bin + 1) as f64,
        y0: y_min - pad,
        y1: y_max + pad,
    };
    svg.push_str(&axes(&scale, "token length", "similarity"));
    // x tick labels, "+"-suffixed for the aggregate bin
    for bin in 1..=report.max_bin + 1 {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            scale.x(bin as f64),
            HEIGHT - MARGIN + 16.0,
            report.bin_label(bin)
        ));
    }
    // CI band
    let mut band = String::from("<polygon points=\"");
    for (x, _, lo, _) in &points {
        band.push_str(&format!("{:.1},{:.1} ", scale.x(*x), scale.y(*lo)));
    }
    for (x, _, _, hi) in points.iter().rev() {
        band.push_str(&format!("{:.1},{:.1} ", scale.x(*x), scale.y(*hi)));
    }
    band.push_str("\" fill=\"#4a90d9\" opacity=\"0.25\"/>\n");
    svg.push_str(&band);
    // mean line
    let mut line = String::from("<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"");
    for (x, mean, _, _) in &points {
        line.push_str(&format!("{:.1},{:.1} ", scale.x(*x), scale.y(*mean)));
    }
    line.push_str("\"/>\n");
    svg.push_str(&line);
    for (x, mean, _, _) in &points {
        svg.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"#1f5fa8\"/>\n",
            scale.x(*x),
            scale.y(*mean)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Side-by-side bars for original and noised token-length counts.
pub fn render_histogram_chart(
    original: &LengthHistogram,
    noised: &LengthHistogram,
    title: &str,
) -> String {
    let mut svg = header(title);
    let max_len = original
        .counts
        .keys()
        .chain(noised.counts.keys())
        .copied()
        .max()
        .unwrap_or(1)
        .min(15);
    let max_count = original
        .counts
        .values()
        .chain(noised.counts.values())
        .copied()
        .max()
        .unwrap_or(1) as f64;
    let scale = Scale {
        x0: 0.5,
        x1: max_len as f64 + 1.0,
        y0: 0.0,
        y1: max_count,
    };
    svg.push_str(&axes(&scale, "token length", "words"));
    let slot = (WIDTH - 2.0 * MARGIN) / (max_len as f64 + 0.5);
    let bar = slot * 0.4;
    for (h, color, shift) in [
        (original, "#1f5fa8", 0.0),
        (noised, "#d9534f", bar),
    ] {
        for (len, count) in &h.counts {
            let len_clamped = (*len).min(max_len);
            let x = scale.x(len_clamped as f64) - bar + shift;
            let y = scale.y(*count as f64);
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar:.1}\" height=\"{:.1}\" fill=\"{color}\" opacity=\"0.8\"/>\n",
                (HEIGHT - MARGIN) - y,
            ));
        }
    }
    for len in 1..=max_len {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{len}</text>\n",
            scale.x(len as f64),
            HEIGHT - MARGIN + 16.0
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"34\" width=\"12\" height=\"12\" fill=\"#1f5fa8\"/>\
         <text x=\"{}\" y=\"44\">original</text>\
         <rect x=\"{}\" y=\"52\" width=\"12\" height=\"12\" fill=\"#d9534f\"/>\
         <text x=\"{}\" y=\"62\">noised</text>\n",
        WIDTH - 150.0,
        WIDTH - 132.0,
        WIDTH - 150.0,
        WIDTH - 132.0,
    ));
    svg.push_str("</svg>\n");
    svg
}
