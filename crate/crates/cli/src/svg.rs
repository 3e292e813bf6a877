//! Minimal SVG output: a framed plot area with a polyline or circles.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for (px, py) in points {
            x = (x.0.min(px), x.1.max(px));
            y = (y.0.min(py), y.1.max(py));
        }
        if !x.0.is_finite() {
            x = (0.0, 1.0);
            y = (0.0, 1.0);
        }
        if x.1 <= x.0 {
            x.1 = x.0 + 1.0;
        }
        y.0 = y.0.min(0.0);
        if y.1 <= y.0 {
            y.1 = y.0 + 1.0;
        }
        Frame { x, y }
    }

    fn map(&self, (px, py): (f64, f64)) -> (f64, f64) {
        let sx = MARGIN + (px - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let sy =
            HEIGHT - MARGIN - (py - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (sx, sy)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, frame: &Frame, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = frame.map((frame.x.0, frame.y.0));
    let (x1, y1) = frame.map((frame.x.1, frame.y.1));
    let _ = writeln!(
        out,
        r#"  <rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"  <text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
    for (v, x) in [(frame.x.0, x0), (frame.x.1, x1)] {
        let _ = writeln!(
            out,
            r#"  <text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.3}</text>"#,
            y0 + 16.0
        );
    }
    for (v, y) in [(frame.y.0, y0), (frame.y.1, y1)] {
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            x0 - 4.0,
            y + 4.0
        );
    }
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64)]) -> String {
    let frame = Frame::fit(points.iter().copied());
    let mut out = String::new();
    header(&mut out, &frame, title, xlabel, ylabel);
    let coords: Vec<String> = points
        .iter()
        .map(|&p| {
            let (x, y) = frame.map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"  <polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        PALETTE[0],
        coords.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

pub fn scatter_plot(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> String {
    let frame = Frame::fit(series.iter().flat_map(|(_, pts)| pts.iter().copied()));
    let mut out = String::new();
    header(&mut out, &frame, title, xlabel, ylabel);
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"  <g fill="{color}">"#);
        for &p in pts {
            let (x, y) = frame.map(p);
            let _ = writeln!(out, r#"    <circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#);
        }
        let _ = writeln!(
            out,
            r#"    <text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - MARGIN + 6.0,
            MARGIN + 16.0 * i as f64,
            escape(label)
        );
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_root_element() {
        let s = line_plot("f <G>", "s1", "f", &[(-4.0, 0.0), (0.0, 0.4), (4.0, 0.0)]);
        assert!(s.starts_with("<svg "));
        assert_eq!(s.matches("<svg").count(), 1);
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("f &lt;G&gt;"));
    }

    #[test]
    fn empty_scatter_is_valid() {
        let s = scatter_plot("t", "x", "y", &[]);
        assert!(s.contains("<rect"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
