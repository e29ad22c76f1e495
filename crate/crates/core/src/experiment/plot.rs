//! Minimal self-contained SVG output: scatter plots of points or embeddings
//! colored by cluster, and sweep curves with a +-1 std band per series.

use crate::error::{Error, Result};
use crate::solvers::SpectralEmbedding;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn color(class: usize) -> &'static str {
    PALETTE[class % PALETTE.len()]
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Result<Self> {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        for x in xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for y in ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !(x_min.is_finite() && y_min.is_finite()) {
            return Err(Error::Input("nothing to plot".into()));
        }
        // Degenerate extents still need a nonzero span to map into.
        if x_max - x_min == 0.0 {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_max - y_min == 0.0 {
            y_min -= 0.5;
            y_max += 0.5;
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{x}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>
"#,
        x = WIDTH / 2.0,
        title = escape(title),
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let x0 = frame.sx(frame.x_min);
    let x1 = frame.sx(frame.x_max);
    let y0 = frame.sy(frame.y_min);
    let y1 = frame.sy(frame.y_max);
    format!(
        concat!(
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>"#,
            "\n",
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>"#,
            "\n",
            r#"<text x="{x0}" y="{ylab}" font-family="sans-serif" font-size="11" text-anchor="middle">{xmin}</text>"#,
            "\n",
            r#"<text x="{x1}" y="{ylab}" font-family="sans-serif" font-size="11" text-anchor="middle">{xmax}</text>"#,
            "\n",
            r#"<text x="{xlab}" y="{y0}" font-family="sans-serif" font-size="11" text-anchor="end">{ymin}</text>"#,
            "\n",
            r#"<text x="{xlab}" y="{y1}" font-family="sans-serif" font-size="11" text-anchor="end">{ymax}</text>"#,
            "\n",
            r#"<text x="{xc}" y="{xtitle}" font-family="sans-serif" font-size="12" text-anchor="middle">{x_label}</text>"#,
            "\n",
            r#"<text x="14" y="{yc}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {yc})">{y_label}</text>"#,
            "\n",
        ),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        ylab = y0 + 16.0,
        xlab = x0 - 6.0,
        xmin = trim_float(frame.x_min),
        xmax = trim_float(frame.x_max),
        ymin = trim_float(frame.y_min),
        ymax = trim_float(frame.y_max),
        xc = (x0 + x1) / 2.0,
        xtitle = HEIGHT - 14.0,
        yc = (y0 + y1) / 2.0,
        x_label = escape(x_label),
        y_label = escape(y_label),
    )
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter plot of 2-D points colored by class id.
pub fn scatter_svg(title: &str, points: &[(f64, f64)], classes: &[usize]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Input("empty point set".into()));
    }
    if points.len() != classes.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            actual: classes.len(),
        });
    }
    let frame = Frame::new(points.iter().map(|p| p.0), points.iter().map(|p| p.1))?;
    let mut svg = header(title);
    svg.push_str(&axes(&frame, "x", "y"));
    for (&(x, y), &c) in points.iter().zip(classes) {
        svg.push_str(&format!(
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" fill-opacity="0.75"/>"#,
            frame.sx(x),
            frame.sy(y),
            color(c)
        ));
        svg.push('\n');
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Scatter of the first one or two embedding coordinates, colored by class.
/// A 1-D embedding is drawn against the node index.
pub fn embedding_svg(
    title: &str,
    embedding: &SpectralEmbedding,
    classes: &[usize],
) -> Result<String> {
    let n = embedding.len();
    if n == 0 {
        return Err(Error::Input("empty embedding".into()));
    }
    let points: Vec<(f64, f64)> = if embedding.dim() >= 2 {
        (0..n)
            .map(|i| (embedding.coordinates[[i, 0]], embedding.coordinates[[i, 1]]))
            .collect()
    } else {
        (0..n)
            .map(|i| (i as f64, embedding.coordinates[[i, 0]]))
            .collect()
    };
    scatter_svg(title, &points, classes)
}

/// One sweep curve: a named series of `(x, mean, std)` triples.
#[derive(Debug, Clone)]
pub struct SweepSeries {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// Mean lines with translucent +-1 std bands, one per series. The x axis
/// spans exactly the swept values.
pub fn sweep_lines_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[SweepSeries],
) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Input("empty report".into()));
    }
    let frame = Frame::new(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        series
            .iter()
            .flat_map(|s| s.points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2])),
    )?;
    let mut svg = header(title);
    svg.push_str(&axes(&frame, x_label, y_label));
    for (si, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let c = color(si);
        // Band polygon: upper edge left-to-right, lower edge back.
        let mut band = String::from("<polygon points=\"");
        for &(x, m, sd) in &s.points {
            band.push_str(&format!("{:.2},{:.2} ", frame.sx(x), frame.sy(m + sd)));
        }
        for &(x, m, sd) in s.points.iter().rev() {
            band.push_str(&format!("{:.2},{:.2} ", frame.sx(x), frame.sy(m - sd)));
        }
        band.push_str(&format!("\" fill=\"{c}\" fill-opacity=\"0.15\"/>\n"));
        svg.push_str(&band);

        let mut line = String::from("<polyline points=\"");
        for &(x, m, _) in &s.points {
            line.push_str(&format!("{:.2},{:.2} ", frame.sx(x), frame.sy(m)));
        }
        line.push_str(&format!(
            "\" fill=\"none\" stroke=\"{c}\" stroke-width=\"2\"/>\n"
        ));
        svg.push_str(&line);

        svg.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * si as f64,
            c,
            escape(&s.name)
        ));
        svg.push('\n');
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_scatter_has_two_markers() {
        let svg = scatter_svg("t", &[(0.0, 0.0), (1.0, 1.0)], &[0, 1]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_inputs_error() {
        assert!(scatter_svg("t", &[], &[]).is_err());
        assert!(sweep_lines_svg("t", "x", "y", &[]).is_err());
    }

    #[test]
    fn sweep_axis_covers_range_exactly() {
        let s = SweepSeries {
            name: "demo".into(),
            points: vec![(0.05, 0.8, 0.02), (0.1, 0.7, 0.03), (0.2, 0.5, 0.06)],
        };
        let svg = sweep_lines_svg("t", "noise", "acc", &[s]).unwrap();
        assert!(svg.contains(">0.05<"));
        assert!(svg.contains(">0.2<"));
        assert!(svg.contains("polygon"));
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn degenerate_extent_is_padded() {
        let svg = scatter_svg("t", &[(1.0, 2.0), (1.0, 2.0)], &[0, 0]).unwrap();
        assert!(svg.contains("<circle"));
    }
}
