//! Hand-written SVG scatter plots. Points are small rounded squares colored by
//! cluster, prototypes are black crosses and bounding balls are translucent
//! light-cyan circles, so in a single plot the `circle` elements are exactly
//! the balls.

use std::fmt::Write;

use ndarray::Array2;

use cvxclust::certify::BoundingBall;
use cvxclust::Partition;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939",
];
pub const BALL_FILL: &str = "#7fe5f0";
pub const BALL_OPACITY: f64 = 0.25;
const MARGIN: f64 = 0.05;
const CELL: f64 = 320.0;
const TITLE_BAND: f64 = 22.0;

pub fn color(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

/// One scatter plot of 2D data.
#[derive(Debug, Clone)]
pub struct Panel {
    pub title: Option<String>,
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
    pub prototypes: Vec<[f64; 2]>,
    pub balls: Vec<([f64; 2], f64)>,
}

impl Panel {
    /// Points colored by `partition`, with a cross at each cluster centroid.
    /// Panics unless `points` has two columns.
    pub fn new(points: &Array2<f64>, partition: &Partition) -> Self {
        assert_eq!(points.ncols(), 2, "scatter plots need 2D data");
        let pts = points.rows().into_iter().map(|r| [r[0], r[1]]).collect();
        let crosses = partition.centroids().rows().into_iter().map(|r| [r[0], r[1]]).collect();
        Self {
            title: None,
            points: pts,
            labels: partition.labels().to_vec(),
            prototypes: crosses,
            balls: Vec::new(),
        }
    }

    pub fn with_balls(mut self, balls: &[BoundingBall]) -> Self {
        self.balls = balls.iter().map(|b| ([b.center[0], b.center[1]], b.radius)).collect();
        self
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    /// `(min_x, min_y, width, height)` in data units, y pointing up, covering
    /// points, prototypes and balls plus a 5% margin on each side.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |p: [f64; 2], r: f64| {
            x0 = x0.min(p[0] - r);
            x1 = x1.max(p[0] + r);
            y0 = y0.min(p[1] - r);
            y1 = y1.max(p[1] + r);
        };
        self.points.iter().chain(&self.prototypes).for_each(|&p| grow(p, 0.0));
        self.balls.iter().for_each(|&(c, r)| grow(c, r));
        if !x0.is_finite() {
            return (-1.0, -1.0, 2.0, 2.0);
        }
        let (mut w, mut h) = (x1 - x0, y1 - y0);
        let fallback = w.max(h).max(1e-12);
        if w <= 0.0 {
            w = fallback;
            x0 -= w / 2.0;
        }
        if h <= 0.0 {
            h = fallback;
            y0 -= h / 2.0;
        }
        (x0 - MARGIN * w, y0 - MARGIN * h, w * (1.0 + 2.0 * MARGIN), h * (1.0 + 2.0 * MARGIN))
    }

    fn view_box(&self) -> String {
        let (x, y, w, h) = self.bounds();
        // SVG y grows downward: plot (x, −y).
        format!("{} {} {} {}", x, -(y + h), w, h)
    }

    fn body(&self, out: &mut String) {
        let (_, _, w, h) = self.bounds();
        let unit = w.max(h);
        let dot = 0.012 * unit;
        let arm = 0.025 * unit;
        out.push_str("<g class=\"balls\">\n");
        for &(c, r) in &self.balls {
            let _ = writeln!(
                out,
                "<circle class=\"ball\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{BALL_FILL}\" fill-opacity=\"{BALL_OPACITY}\" stroke=\"{BALL_FILL}\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\"/>",
                c[0], -c[1], r
            );
        }
        out.push_str("</g>\n<g class=\"points\">\n");
        for (p, &l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(
                out,
                "<rect class=\"point\" x=\"{}\" y=\"{}\" width=\"{dot}\" height=\"{dot}\" rx=\"{}\" fill=\"{}\"/>",
                p[0] - dot / 2.0,
                -p[1] - dot / 2.0,
                dot / 2.0,
                color(l)
            );
        }
        out.push_str("</g>\n<g class=\"prototypes\" stroke=\"#000000\" stroke-width=\"1.5\">\n");
        for p in &self.prototypes {
            let (x, y) = (p[0], -p[1]);
            let _ = writeln!(
                out,
                "<path class=\"prototype\" d=\"M{} {}L{} {}M{} {}L{} {}\" vector-effect=\"non-scaling-stroke\"/>",
                x - arm,
                y - arm,
                x + arm,
                y + arm,
                x - arm,
                y + arm,
                x + arm,
                y - arm
            );
        }
        out.push_str("</g>\n");
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A standalone plot whose viewBox is the panel's data bounds.
pub fn render(panel: &Panel) -> String {
    let (_, _, w, h) = panel.bounds();
    let width = 640.0;
    let height = (width * h / w).clamp(160.0, 1280.0);
    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height:.0}\" viewBox=\"{}\" preserveAspectRatio=\"xMidYMid meet\">\n",
        panel.view_box()
    );
    if let Some(t) = &panel.title {
        let _ = writeln!(out, "<title>{}</title>", escape(t));
    }
    panel.body(&mut out);
    out.push_str("</svg>\n");
    out
}

/// Small multiples laid out row-major in `cols` columns, each panel in its
/// own nested viewport.
pub fn render_grid(panels: &[Panel], cols: usize, title: Option<&str>) -> String {
    let cols = cols.max(1).min(panels.len().max(1));
    let rows = panels.len().div_ceil(cols).max(1);
    let top = if title.is_some() { TITLE_BAND } else { 0.0 };
    let width = cols as f64 * CELL;
    let height = top + rows as f64 * (CELL + TITLE_BAND);
    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"13\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
    );
    if let Some(t) = title {
        let _ = writeln!(out, "<text x=\"{}\" y=\"16\" text-anchor=\"middle\">{}</text>", width / 2.0, escape(t));
    }
    for (idx, panel) in panels.iter().enumerate() {
        let x = (idx % cols) as f64 * CELL;
        let y = top + (idx / cols) as f64 * (CELL + TITLE_BAND);
        if let Some(t) = &panel.title {
            let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", x + CELL / 2.0, y + 16.0, escape(t));
        }
        let _ = writeln!(
            out,
            "<svg x=\"{x}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" viewBox=\"{}\" preserveAspectRatio=\"xMidYMid meet\">",
            y + TITLE_BAND,
            panel.view_box()
        );
        panel.body(&mut out);
        out.push_str("</svg>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Step chart of `(x, y)` series against a log-scaled x axis, e.g. cluster
/// count over a λ grid.
pub fn render_log_steps(title: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, pad) = (640.0, 360.0, 48.0);
    let xs = series.iter().flat_map(|(_, s)| s.iter().map(|p| p.0.ln()));
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let y1 = series
        .iter()
        .flat_map(|(_, s)| s.iter().map(|p| p.1))
        .fold(1.0f64, f64::max);
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| pad + (x.ln() - x0) / span * (w - 2.0 * pad);
    let py = |y: f64| h - pad - y / y1 * (h - 2.0 * pad);
    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        "<path d=\"M{pad} {pad}V{}H{}\" fill=\"none\" stroke=\"#000000\"/>\n<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{}</text>\n<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log λ</text>",
        h - pad,
        w - pad,
        h / 2.0,
        h / 2.0,
        escape(y_label),
        w / 2.0,
        h - 12.0
    );
    for (idx, (name, pts)) in series.iter().enumerate() {
        let mut d = String::new();
        for (j, &(x, y)) in pts.iter().enumerate() {
            if j == 0 {
                let _ = write!(d, "M{:.2} {:.2}", px(x), py(y));
            } else {
                let _ = write!(d, "H{:.2}V{:.2}", px(x), py(y));
            }
        }
        let _ = writeln!(
            out,
            "<path class=\"series\" d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>",
            color(idx),
            w - pad - 80.0,
            pad + 16.0 * idx as f64,
            color(idx),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn bounds_cover_balls_with_margin() {
        let pts = array![[0.0, 0.0], [10.0, 0.0]];
        let part = Partition::extract(&pts, 1e-9);
        let panel = Panel::new(&pts, &part).with_balls(&[BoundingBall {
            cluster_index: 0,
            center: vec![0.0, 0.0],
            radius: 2.0,
        }]);
        let (x, y, w, h) = panel.bounds();
        assert!((w - 12.0 * 1.1).abs() < 1e-12);
        assert!((h - 4.0 * 1.1).abs() < 1e-12);
        assert!((x + 2.0 + 0.6).abs() < 1e-12 && (y + 2.0 + 0.2).abs() < 1e-12);
    }

    #[test]
    fn palette_cycles() {
        assert_eq!(color(0), color(12));
        assert_ne!(color(0), color(11));
    }

    #[test]
    fn degenerate_bounds_are_square() {
        let pts = array![[1.0, 1.0], [1.0, 1.0]];
        let panel = Panel::new(&pts, &Partition::extract(&pts, 1e-9));
        let (_, _, w, h) = panel.bounds();
        assert!(w > 0.0 && w == h);
    }
}
