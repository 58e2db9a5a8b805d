//! Static SVG rendering of trace and sweep CSVs.
//!
//! The renderer is deliberately dumb: it parses one of the two CSV shapes
//! this package itself writes, scales the data into a fixed 640x480 frame,
//! and emits hand-assembled SVG. Everything is a pure function of the input
//! bytes, so identical inputs produce identical files.

use std::fmt::Write;

use bearing_search::simulator::CSV_HEADER;
use bearing_search::Error;

use crate::SWEEP_HEADER;

/// What to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Vehicle path, estimate scatter, and the true target (trace CSV).
    Trajectory,
    /// Estimation error over time (trace CSV).
    #[value(name = "est_error")]
    EstError,
    /// True and estimated range over time (trace CSV).
    Range,
    /// Mean search time per trade-off weight (sweep CSV).
    Sweep,
}

/// The trace columns the plots consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub p_hat: Option<(f64, f64)>,
    pub e_est: Option<f64>,
    pub r_hat: Option<f64>,
    pub r_true: f64,
}

fn shape_err(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn req(cell: &str, name: &str, line_no: usize) -> Result<f64, Error> {
    cell.parse().map_err(|_| {
        shape_err(format!(
            "line {line_no}: column {name} is not a number: {cell:?}"
        ))
    })
}

fn opt(cell: &str, name: &str, line_no: usize) -> Result<Option<f64>, Error> {
    if cell.is_empty() {
        Ok(None)
    } else {
        req(cell, name, line_no).map(Some)
    }
}

/// Parse a trace CSV as written by the simulator. The header must match
/// verbatim; that is the shape contract.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>, Error> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(_) => return Err(shape_err("input is not a trace CSV (header mismatch)")),
        None => return Err(shape_err("input is empty")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 15 {
            return Err(shape_err(format!(
                "line {line_no}: expected 15 cells, got {}",
                cells.len()
            )));
        }
        let p_hat_x = opt(cells[7], "p_hat_x", line_no)?;
        let p_hat_y = opt(cells[8], "p_hat_y", line_no)?;
        rows.push(TraceRow {
            t: req(cells[1], "t", line_no)?,
            x: req(cells[2], "x", line_no)?,
            y: req(cells[3], "y", line_no)?,
            p_hat: p_hat_x.zip(p_hat_y),
            e_est: opt(cells[9], "e_est", line_no)?,
            r_hat: opt(cells[10], "r_hat", line_no)?,
            r_true: req(cells[11], "r_true", line_no)?,
        });
    }
    if rows.is_empty() {
        return Err(shape_err("trace CSV has no data rows"));
    }
    Ok(rows)
}

/// Parse a sweep table into (beta, mean_search_time) pairs.
pub fn parse_sweep(text: &str) -> Result<Vec<(f64, f64)>, Error> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SWEEP_HEADER => {}
        Some(_) => return Err(shape_err("input is not a sweep CSV (header mismatch)")),
        None => return Err(shape_err("input is empty")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(shape_err(format!(
                "line {line_no}: expected 4 cells, got {}",
                cells.len()
            )));
        }
        let beta = req(cells[0], "beta", line_no)?;
        let time = req(cells[1], "mean_search_time", line_no)?;
        if beta.is_finite() && time.is_finite() {
            rows.push((beta, time));
        }
    }
    if rows.is_empty() {
        return Err(shape_err("sweep CSV has no plottable rows"));
    }
    Ok(rows)
}

/// Recover the true target position from the harness columns of a trace.
///
/// Each row pins the target to a circle of radius `r_true` around the
/// vehicle; two chord differences between three well-spread rows intersect
/// in the target. A perfectly straight run makes every triple collinear, in
/// which case the last recorded estimate stands in (on the runs that drive
/// straight at the target the final estimate is the target).
pub fn recover_target(rows: &[TraceRow]) -> Option<(f64, f64)> {
    if rows.len() >= 3 {
        let a = &rows[0];
        let c = &rows[rows.len() - 1];
        let mut best: Option<(f64, (f64, f64))> = None;
        for b in &rows[1..rows.len() - 1] {
            let a11 = 2.0 * (b.x - a.x);
            let a12 = 2.0 * (b.y - a.y);
            let a21 = 2.0 * (c.x - b.x);
            let a22 = 2.0 * (c.y - b.y);
            let d1 = a.r_true * a.r_true - b.r_true * b.r_true + b.x * b.x - a.x * a.x + b.y * b.y
                - a.y * a.y;
            let d2 = b.r_true * b.r_true - c.r_true * c.r_true + c.x * c.x - b.x * b.x + c.y * c.y
                - b.y * b.y;
            let det = a11 * a22 - a12 * a21;
            if best.is_none_or(|(d, _)| det.abs() > d) {
                let tx = (d1 * a22 - d2 * a12) / det;
                let ty = (a11 * d2 - a21 * d1) / det;
                best = Some((det.abs(), (tx, ty)));
            }
        }
        if let Some((det, target)) = best {
            let span = (c.x - a.x).abs() + (c.y - a.y).abs();
            if det > 1e-9 * (1.0 + span * span) && target.0.is_finite() && target.1.is_finite() {
                return Some(target);
            }
        }
    }
    rows.iter().rev().find_map(|r| r.p_hat)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;

/// Data-to-pixel mapping for the plot area.
struct AxisBox {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

fn span_of(values: impl Iterator<Item = f64>) -> Result<(f64, f64), Error> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        return Err(shape_err("no finite values to plot"));
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    Ok((lo, hi))
}

impl AxisBox {
    fn plot_width() -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_height() -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn new(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Result<Self, Error> {
        let (xlo, xhi) = span_of(xs)?;
        let (ylo, yhi) = span_of(ys)?;
        let xpad = 0.05 * (xhi - xlo);
        let ypad = 0.05 * (yhi - ylo);
        Ok(AxisBox {
            xmin: xlo - xpad,
            xmax: xhi + xpad,
            ymin: ylo - ypad,
            ymax: yhi + ypad,
        })
    }

    /// Widen the slack axis so one meter spans the same number of pixels
    /// both ways; trajectory plots would otherwise shear the geometry.
    fn equalize_aspect(&mut self) {
        let sx = Self::plot_width() / (self.xmax - self.xmin);
        let sy = Self::plot_height() / (self.ymax - self.ymin);
        let s = sx.min(sy);
        let extra_x = Self::plot_width() / s - (self.xmax - self.xmin);
        let extra_y = Self::plot_height() / s - (self.ymax - self.ymin);
        self.xmin -= extra_x / 2.0;
        self.xmax += extra_x / 2.0;
        self.ymin -= extra_y / 2.0;
        self.ymax += extra_y / 2.0;
    }

    fn map_x(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.xmin) / (self.xmax - self.xmin) * Self::plot_width()
    }

    fn map_y(&self, y: f64) -> f64 {
        MARGIN_TOP + Self::plot_height()
            - (y - self.ymin) / (self.ymax - self.ymin) * Self::plot_height()
    }
}

/// Pixel coordinate with stable formatting.
fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// Tick label: up to three significant decimals, trailing zeros trimmed.
fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    let mut s = if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    };
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    let mut s = String::with_capacity(pts.len() * 14);
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&px(*x));
        s.push(',');
        s.push_str(&px(*y));
    }
    s
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(
            body,
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
        );
        let _ = writeln!(
            body,
            "<text class=\"title\" x=\"{}\" y=\"22\" text-anchor=\"middle\" \
             font-size=\"14\">{title}</text>",
            WIDTH / 2.0
        );
        Svg { body }
    }

    fn axes(&mut self, a: &AxisBox, x_label: &str, y_label: &str) {
        let left = MARGIN_LEFT;
        let right = WIDTH - MARGIN_RIGHT;
        let top = MARGIN_TOP;
        let bottom = HEIGHT - MARGIN_BOTTOM;
        let _ = writeln!(
            self.body,
            "<g class=\"axes\" stroke=\"#555555\" fill=\"none\">\n\
             <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
            px(left),
            px(top),
            px(right - left),
            px(bottom - top)
        );
        for i in 0..=4 {
            let fx = self.tick_fraction(i);
            let x = a.xmin + fx * (a.xmax - a.xmin);
            let cx = a.map_x(x);
            let _ = writeln!(
                self.body,
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>",
                px(cx),
                px(bottom),
                px(bottom + 5.0)
            );
            let y = a.ymin + fx * (a.ymax - a.ymin);
            let cy = a.map_y(y);
            let _ = writeln!(
                self.body,
                "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\"/>",
                px(cy),
                px(left - 5.0),
                px(left)
            );
        }
        let _ = writeln!(
            self.body,
            "</g>\n<g class=\"tick-labels\" fill=\"#333333\">"
        );
        for i in 0..=4 {
            let fx = self.tick_fraction(i);
            let x = a.xmin + fx * (a.xmax - a.xmin);
            let _ = writeln!(
                self.body,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                px(a.map_x(x)),
                px(bottom + 18.0),
                tick_label(x)
            );
            let y = a.ymin + fx * (a.ymax - a.ymin);
            let _ = writeln!(
                self.body,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
                px(left - 9.0),
                px(a.map_y(y) + 4.0),
                tick_label(y)
            );
        }
        let _ = writeln!(
            self.body,
            "<text class=\"x-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
            px((left + right) / 2.0),
            px(HEIGHT - 14.0)
        );
        let _ = writeln!(
            self.body,
            "<text class=\"y-label\" x=\"16\" y=\"{0}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 16 {0})\">{y_label}</text>",
            px((top + bottom) / 2.0)
        );
        let _ = writeln!(self.body, "</g>");
    }

    fn tick_fraction(&self, i: usize) -> f64 {
        i as f64 / 4.0
    }

    fn polyline(&mut self, pts: &[(f64, f64)], class: &str, style: &str) {
        let _ = writeln!(
            self.body,
            "<polyline class=\"{class}\" fill=\"none\" {style} points=\"{}\"/>",
            points_attr(pts)
        );
    }

    fn legend(&mut self, entries: &[(&str, &str)]) {
        // One swatch+label pair per entry, right-aligned under the title.
        let mut x = WIDTH - MARGIN_RIGHT - 10.0;
        let y = MARGIN_TOP - 8.0;
        let _ = writeln!(self.body, "<g class=\"legend\">");
        for (label, color) in entries.iter().rev() {
            let w = 14.0 + 7.0 * label.len() as f64 + 22.0;
            x -= w;
            let _ = writeln!(
                self.body,
                "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"3\" fill=\"{color}\"/>\n\
                 <text x=\"{}\" y=\"{}\" fill=\"#333333\">{label}</text>",
                px(x),
                px(y - 3.0),
                px(x + 16.0),
                px(y + 2.0)
            );
        }
        let _ = writeln!(self.body, "</g>");
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

const COLOR_PATH: &str = "#1f6feb";
const COLOR_ESTIMATE: &str = "#d29922";
const COLOR_TARGET: &str = "#cf222e";

fn render_trajectory(rows: &[TraceRow]) -> Result<String, Error> {
    let target = recover_target(rows);
    let xs = rows
        .iter()
        .map(|r| r.x)
        .chain(rows.iter().filter_map(|r| r.p_hat.map(|p| p.0)))
        .chain(target.map(|t| t.0));
    let ys = rows
        .iter()
        .map(|r| r.y)
        .chain(rows.iter().filter_map(|r| r.p_hat.map(|p| p.1)))
        .chain(target.map(|t| t.1));
    let mut axes = AxisBox::new(xs, ys)?;
    axes.equalize_aspect();

    let mut svg = Svg::new("Vehicle path and target estimates");
    svg.axes(&axes, "x (m)", "y (m)");
    svg.legend(&[
        ("path", COLOR_PATH),
        ("estimates", COLOR_ESTIMATE),
        ("target", COLOR_TARGET),
    ]);

    let path: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (axes.map_x(r.x), axes.map_y(r.y)))
        .collect();
    svg.polyline(
        &path,
        "path",
        &format!("stroke=\"{COLOR_PATH}\" stroke-width=\"1.5\""),
    );
    let _ = writeln!(
        svg.body,
        "<g class=\"estimates\" fill=\"none\" stroke=\"{COLOR_ESTIMATE}\" stroke-width=\"0.8\">"
    );
    for r in rows {
        if let Some((ex, ey)) = r.p_hat {
            let _ = writeln!(
                svg.body,
                "<circle class=\"estimate\" cx=\"{}\" cy=\"{}\" r=\"2\"/>",
                px(axes.map_x(ex)),
                px(axes.map_y(ey))
            );
        }
    }
    let _ = writeln!(svg.body, "</g>");
    // Start marker: a small filled square at the first pose.
    let (sx, sy) = (axes.map_x(rows[0].x), axes.map_y(rows[0].y));
    let _ = writeln!(
        svg.body,
        "<rect class=\"start\" x=\"{}\" y=\"{}\" width=\"6\" height=\"6\" fill=\"{COLOR_PATH}\"/>",
        px(sx - 3.0),
        px(sy - 3.0)
    );
    if let Some((tx, ty)) = target {
        let (cx, cy) = (axes.map_x(tx), axes.map_y(ty));
        let _ = writeln!(
            svg.body,
            "<g class=\"target\" stroke=\"{COLOR_TARGET}\" stroke-width=\"1.5\" fill=\"none\">\n\
             <circle cx=\"{0}\" cy=\"{1}\" r=\"5\"/>\n\
             <line x1=\"{2}\" y1=\"{1}\" x2=\"{3}\" y2=\"{1}\"/>\n\
             <line x1=\"{0}\" y1=\"{4}\" x2=\"{0}\" y2=\"{5}\"/>\n</g>",
            px(cx),
            px(cy),
            px(cx - 9.0),
            px(cx + 9.0),
            px(cy - 9.0),
            px(cy + 9.0)
        );
    }
    Ok(svg.finish())
}

fn render_est_error(rows: &[TraceRow]) -> Result<String, Error> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.e_est.map(|e| (r.t, e)))
        .collect();
    if pts.is_empty() {
        return Err(shape_err("trace carries no estimation-error values"));
    }
    let axes = AxisBox::new(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1))?;
    let mut svg = Svg::new("Estimation error");
    svg.axes(&axes, "t (s)", "estimation error (m)");
    let mapped: Vec<(f64, f64)> = pts
        .iter()
        .map(|(t, e)| (axes.map_x(*t), axes.map_y(*e)))
        .collect();
    svg.polyline(
        &mapped,
        "series",
        &format!("stroke=\"{COLOR_PATH}\" stroke-width=\"1.5\""),
    );
    Ok(svg.finish())
}

fn render_range(rows: &[TraceRow]) -> Result<String, Error> {
    let truth: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.r_true)).collect();
    let est: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.r_hat.map(|v| (r.t, v)))
        .collect();
    let axes = AxisBox::new(
        truth.iter().map(|p| p.0),
        truth.iter().map(|p| p.1).chain(est.iter().map(|p| p.1)),
    )?;
    let mut svg = Svg::new("True and estimated range");
    svg.axes(&axes, "t (s)", "range (m)");
    svg.legend(&[("true", COLOR_PATH), ("estimated", COLOR_ESTIMATE)]);
    let mapped_truth: Vec<(f64, f64)> = truth
        .iter()
        .map(|(t, v)| (axes.map_x(*t), axes.map_y(*v)))
        .collect();
    svg.polyline(
        &mapped_truth,
        "r-true",
        &format!("stroke=\"{COLOR_PATH}\" stroke-width=\"1.5\""),
    );
    if !est.is_empty() {
        let mapped_est: Vec<(f64, f64)> = est
            .iter()
            .map(|(t, v)| (axes.map_x(*t), axes.map_y(*v)))
            .collect();
        svg.polyline(
            &mapped_est,
            "r-hat",
            &format!("stroke=\"{COLOR_ESTIMATE}\" stroke-width=\"1.5\" stroke-dasharray=\"5 3\""),
        );
    }
    Ok(svg.finish())
}

fn render_sweep(rows: &[(f64, f64)]) -> Result<String, Error> {
    let axes = AxisBox::new(rows.iter().map(|p| p.0), rows.iter().map(|p| p.1))?;
    let mut svg = Svg::new("Search time vs trade-off weight");
    svg.axes(&axes, "beta", "mean search time (s)");
    let mapped: Vec<(f64, f64)> = rows
        .iter()
        .map(|(b, t)| (axes.map_x(*b), axes.map_y(*t)))
        .collect();
    svg.polyline(
        &mapped,
        "sweep-line",
        &format!("stroke=\"{COLOR_PATH}\" stroke-width=\"1.5\""),
    );
    let _ = writeln!(svg.body, "<g class=\"sweep-points\" fill=\"{COLOR_PATH}\">");
    for (x, y) in &mapped {
        let _ = writeln!(
            svg.body,
            "<circle class=\"sweep-point\" cx=\"{}\" cy=\"{}\" r=\"3\"/>",
            px(*x),
            px(*y)
        );
    }
    let _ = writeln!(svg.body, "</g>");
    Ok(svg.finish())
}

/// Render CSV text to SVG. The CSV must have the shape the kind expects:
/// a simulator trace for everything except `sweep`, which takes the sweep
/// table.
pub fn render(kind: PlotKind, csv_text: &str) -> Result<String, Error> {
    match kind {
        PlotKind::Trajectory => render_trajectory(&parse_trace(csv_text)?),
        PlotKind::EstError => render_est_error(&parse_trace(csv_text)?),
        PlotKind::Range => render_range(&parse_trace(csv_text)?),
        PlotKind::Sweep => render_sweep(&parse_sweep(csv_text)?),
    }
}
