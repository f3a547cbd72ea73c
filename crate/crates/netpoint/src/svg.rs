//! Self-contained SVG rendering: curve plots for K and pair-correlation
//! summaries, grid heatmaps for smoothed fields, and the network itself with
//! edges shaded by a statistic and vertices colored by cluster label. Output
//! is plain string building, so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::graph::NetworkGraph;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// One named polyline in a curve plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Categorical palette for cluster labels (cycled past ten).
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn category_color(label: usize) -> &'static str {
    PALETTE[label % PALETTE.len()]
}

/// Perceptual color ramp from dark purple to yellow, t in [0, 1].
pub fn ramp_color(t: f64) -> String {
    const ANCHORS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (ANCHORS.len() - 1) as f64;
    let lo = (t.floor() as usize).min(ANCHORS.len() - 2);
    let f = t - lo as f64;
    let mix = |a: f64, b: f64| (a + f * (b - a)).round() as u8;
    let (r1, g1, b1) = ANCHORS[lo];
    let (r2, g2, b2) = ANCHORS[lo + 1];
    format!("#{:02x}{:02x}{:02x}", mix(r1, r2), mix(g1, g2), mix(b1, b2))
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let text = format!("{v:.6}");
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// Tick positions covering [min, max] at a round step.
fn ticks(min: f64, max: f64) -> Vec<f64> {
    if !(max > min) {
        return vec![min];
    }
    let rough = (max - min) / 4.0;
    let mag = 10f64.powf(rough.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|s| s * mag)
        .find(|&s| s >= rough)
        .unwrap_or(10.0 * mag);
    let mut out = Vec::new();
    let mut k = (min / step).ceil() as i64;
    while (k as f64) * step <= max + 1e-12 * step {
        out.push((k as f64) * step);
        k += 1;
    }
    out
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN + (v - self.x_min) / span * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN - (v - self.y_min) / span * (HEIGHT - 2.0 * MARGIN)
    }
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
}

fn draw_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN, WIDTH - MARGIN);
    let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    for t in ticks(frame.x_min, frame.x_max) {
        let px = frame.x(t);
        let _ = writeln!(
            out,
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            y0 + 18.0,
            fmt_num(t)
        );
    }
    for t in ticks(frame.y_min, frame.y_max) {
        let py = frame.y(t);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>",
            x0 - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            py + 4.0,
            fmt_num(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

/// Render one or more (x, y) series as lines with axes and a legend.
pub fn curve_svg(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let points = series.iter().flat_map(|s| s.points.iter().copied());
    let finite: Vec<(f64, f64)> = points.filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let x_min = finite.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).min(0.0);
    let x_max = finite.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let y_min = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(0.0);
    let y_max = finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).max(1e-12);
    let frame = Frame { x_min, x_max, y_min, y_max };
    let mut out = String::new();
    open_svg(&mut out, WIDTH, HEIGHT);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        WIDTH / 2.0
    );
    draw_axes(&mut out, &frame, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let color = category_color(i);
        let mut path = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            let _ = write!(path, "{}{},{}", if j == 0 { "" } else { " " }, frame.x(x), frame.y(y));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            WIDTH - MARGIN - 120.0,
            WIDTH - MARGIN - 96.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            WIDTH - MARGIN - 90.0,
            ly + 4.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Render a grid of values (row-major, `iy * nx + ix`) as colored cells.
pub fn heatmap_svg(title: &str, xs: &[f64], ys: &[f64], values: &[f64]) -> String {
    let (nx, ny) = (xs.len(), ys.len());
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let v_min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (v_max - v_min).max(f64::MIN_POSITIVE);
    let cell_w = (WIDTH - 2.0 * MARGIN) / nx.max(1) as f64;
    let cell_h = (HEIGHT - 2.0 * MARGIN) / ny.max(1) as f64;
    let mut out = String::new();
    open_svg(&mut out, WIDTH, HEIGHT);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        WIDTH / 2.0
    );
    for iy in 0..ny {
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            if !v.is_finite() {
                continue;
            }
            let color = ramp_color((v - v_min) / span);
            let px = MARGIN + ix as f64 * cell_w;
            // Flip so larger y sits higher, as on a map.
            let py = HEIGHT - MARGIN - (iy + 1) as f64 * cell_h;
            let _ = writeln!(
                out,
                "<rect x=\"{px}\" y=\"{py}\" width=\"{cell_w}\" height=\"{cell_h}\" fill=\"{color}\"/>"
            );
        }
    }
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"{}\">range {} to {}</text>",
        HEIGHT - MARGIN + 20.0,
        fmt_num(v_min),
        fmt_num(v_max)
    );
    out.push_str("</svg>\n");
    out
}

fn planar_frame(graph: &NetworkGraph) -> Frame {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for v in graph.vertices() {
        x_min = x_min.min(v.x);
        x_max = x_max.max(v.x);
        y_min = y_min.min(v.y);
        y_max = y_max.max(v.y);
    }
    for e in graph.edges() {
        if let Some(g) = &e.geometry {
            for &(x, y) in g {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    if !(x_max > x_min) {
        x_max = x_min + 1.0;
    }
    if !(y_max > y_min) {
        y_max = y_min + 1.0;
    }
    Frame { x_min, x_max, y_min, y_max }
}

/// Draw the network; edges shaded by `edge_values` when given (otherwise
/// grey), vertices colored by `vertex_labels` when given.
pub fn network_svg(
    graph: &NetworkGraph,
    title: &str,
    edge_values: Option<&[f64]>,
    vertex_labels: Option<&[usize]>,
) -> String {
    let frame = planar_frame(graph);
    let (v_min, v_max) = match edge_values {
        Some(vals) => {
            let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
            (
                finite.iter().copied().fold(f64::INFINITY, f64::min),
                finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        }
        None => (0.0, 1.0),
    };
    let span = (v_max - v_min).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    open_svg(&mut out, WIDTH, HEIGHT);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        WIDTH / 2.0
    );
    for e in graph.edges() {
        let color = match edge_values {
            Some(vals) if vals[e.id].is_finite() => ramp_color((vals[e.id] - v_min) / span),
            Some(_) => "#cccccc".to_string(),
            None => "#888888".to_string(),
        };
        let polyline: Vec<(f64, f64)> = match &e.geometry {
            Some(g) => g.clone(),
            None => {
                let t = graph.vertex(e.tail).unwrap();
                let h = graph.vertex(e.head).unwrap();
                vec![(t.x, t.y), (h.x, h.y)]
            }
        };
        let mut path = String::new();
        for (j, &(x, y)) in polyline.iter().enumerate() {
            let _ = write!(path, "{}{},{}", if j == 0 { "" } else { " " }, frame.x(x), frame.y(y));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>"
        );
    }
    for v in graph.vertices() {
        let fill = match vertex_labels {
            Some(labels) => category_color(labels[v.id]),
            None => "#333333",
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{fill}\"/>",
            frame.x(v.x),
            frame.y(v.y)
        );
    }
    if edge_values.is_some() {
        let _ = writeln!(
            out,
            "<text x=\"{MARGIN}\" y=\"{}\">edge statistic range {} to {}</text>",
            HEIGHT - 12.0,
            fmt_num(v_min),
            fmt_num(v_max)
        );
    }
    out.push_str("</svg>\n");
    out
}
