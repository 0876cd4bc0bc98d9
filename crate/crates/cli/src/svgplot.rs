//! Built-in minimal SVG plotter for the quick-look plots.
//!
//! Convenience output only — the CSVs are the normative artifacts and
//! external tools regenerate publication figures from them. Hand-rolled
//! because the plots are three fixed kinds of simple vector drawing; a
//! plotting dependency would dwarf the code it replaces.

use std::path::Path;

use crate::errors::Result;
use crate::io::write_atomic;

/// One named line/scatter series.
pub struct Series {
    /// Legend label.
    pub name: String,
    /// Data points.
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 800.0;
const H: f64 = 520.0;
const ML: f64 = 70.0; // left margin
const MR: f64 = 160.0; // right margin (legend)
const MT: f64 = 40.0;
const MB: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn around(series: &[Series]) -> Frame {
        let mut f = Frame {
            x_lo: f64::INFINITY,
            x_hi: f64::NEG_INFINITY,
            y_lo: f64::INFINITY,
            y_hi: f64::NEG_INFINITY,
        };
        for s in series {
            for &(x, y) in &s.points {
                f.x_lo = f.x_lo.min(x);
                f.x_hi = f.x_hi.max(x);
                f.y_lo = f.y_lo.min(y);
                f.y_hi = f.y_hi.max(y);
            }
        }
        for (lo, hi) in [(&mut f.x_lo, &mut f.x_hi), (&mut f.y_lo, &mut f.y_hi)] {
            if !lo.is_finite() || !hi.is_finite() {
                (*lo, *hi) = (0.0, 1.0);
            } else if *lo == *hi {
                *lo -= 0.5;
                *hi += 0.5;
            } else {
                let pad = (*hi - *lo) * 0.05;
                *lo -= pad;
                *hi += pad;
            }
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        ML + (x - self.x_lo) / (self.x_hi - self.x_lo) * (W - ML - MR)
    }

    fn py(&self, y: f64) -> f64 {
        H - MB - (y - self.y_lo) / (self.y_hi - self.y_lo) * (H - MT - MB)
    }
}

fn open_svg(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" ",
            "font-family=\"sans-serif\" font-size=\"13\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n"
        ),
        w = W,
        h = H,
        tx = (ML + (W - MR)) / 2.0,
        title = esc(title),
    )
}

fn axes(svg: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    for i in 0..=4 {
        let tx = f.x_lo + (f.x_hi - f.x_lo) * i as f64 / 4.0;
        let ty = f.y_lo + (f.y_hi - f.y_lo) * i as f64 / 4.0;
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1}\" x2=\"{0:.2}\" y2=\"{2}\" stroke=\"#333\"/>\n\
             <text x=\"{0:.2}\" y=\"{3}\" text-anchor=\"middle\">{4:.4}</text>\n",
            f.px(tx),
            H - MB,
            H - MB + 5.0,
            H - MB + 20.0,
            tx
        ));
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1:.2}\" x2=\"{2}\" y2=\"{1:.2}\" stroke=\"#333\"/>\n\
             <text x=\"{3}\" y=\"{4:.2}\" text-anchor=\"end\">{5:.4}</text>\n",
            ML - 5.0,
            f.py(ty),
            ML,
            ML - 8.0,
            f.py(ty) + 4.0,
            ty
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 10.0,
        esc(xlabel)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        esc(ylabel)
    ));
}

fn legend(svg: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = MT + 16.0 + 18.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{y:.2}\" x2=\"{1}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{2}\" y=\"{3:.2}\">{4}</text>\n",
            W - MR + 10.0,
            W - MR + 34.0,
            W - MR + 40.0,
            y + 4.0,
            esc(name)
        ));
    }
}

/// Multi-series polyline plot (density curves, descending singular values).
pub fn line_plot(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[Series],
) -> Result<()> {
    let f = Frame::around(series);
    let mut svg = open_svg(title);
    axes(&mut svg, &f, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
    }
    legend(&mut svg, &series.iter().map(|s| s.name.as_str()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    write_atomic(path, svg.as_bytes())
}

/// Equal-aspect complex-plane scatter with the unit circle (and an outer
/// guide circle) for eigenvalue quick-looks.
pub fn eigen_scatter(path: &Path, title: &str, series: &[Series], guide_radius: f64) -> Result<()> {
    // Symmetric square frame covering all points and the guide circle.
    let mut r = guide_radius;
    for s in series {
        for &(x, y) in &s.points {
            r = r.max(x.abs()).max(y.abs());
        }
    }
    r *= 1.1;
    let f = Frame {
        x_lo: -r,
        x_hi: r,
        y_lo: -r,
        y_hi: r,
    };
    // Equal aspect: use the smaller pixel span for both axes.
    let side = (W - ML - MR).min(H - MT - MB);
    let cx = ML + (W - ML - MR) / 2.0;
    let cy = MT + (H - MT - MB) / 2.0;
    let px = |x: f64| cx + x / r * side / 2.0;
    let py = |y: f64| cy - y / r * side / 2.0;

    let mut svg = open_svg(title);
    axes(&mut svg, &f, "Re", "Im");
    for (circle_r, dash) in [(1.0, "none"), (guide_radius, "4 3")] {
        svg.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#333\" stroke-dasharray=\"{dash}\"/>\n",
            circle_r / r * side / 2.0
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for &(x, y) in &s.points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\" fill-opacity=\"0.6\"/>\n",
                px(x),
                py(y)
            ));
        }
    }
    legend(&mut svg, &series.iter().map(|s| s.name.as_str()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    write_atomic(path, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_wellformed_svg() {
        let dir = std::env::temp_dir().join("pinnspect-svg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.svg");
        line_plot(
            &p,
            "t<&>",
            "x",
            "y",
            &[Series {
                name: "a".into(),
                points: vec![(0.0, 0.0), (1.0, 1.0)],
            }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.ends_with("</svg>\n"));
        assert!(text.contains("&lt;&amp;&gt;"));
        assert!(!text.contains("NaN"));
    }

    #[test]
    fn degenerate_series_still_render() {
        let dir = std::env::temp_dir().join("pinnspect-svg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("d.svg");
        eigen_scatter(
            &p,
            "eigen",
            &[Series {
                name: "λ".into(),
                points: vec![(0.5, 0.5)],
            }],
            1.1,
        )
        .unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("circle"));
    }
}
