//! Minimal static SVG plots: step paths for trajectories and markers for
//! pmf comparisons. Output depends only on the data, never on the clock.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, Clone, Copy)]
pub enum Style {
    /// Right-continuous step function through the points.
    Step,
    /// Circle markers.
    Points,
    /// Cross markers.
    Crosses,
}

pub struct Series {
    pub label: String,
    pub style: Style,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    fn frame(&self) -> Frame {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y1) = (0.0, 1.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        Frame { x0, x1, y0, y1: y1 * 1.05 }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="25" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        // axes with min/max tick labels
        let (l, r, b, t) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
        let _ = writeln!(s, r#"<path d="M{l},{t} L{l},{b} L{r},{b}" stroke="black" fill="none"/>"#);
        for (x, anchor) in [(f.x0, l), (f.x1, r)] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
                b + 15.0,
                tick(x)
            );
        }
        for (y, at) in [(f.y0, b), (f.y1, t)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
                l - 5.0,
                at + 4.0,
                tick(y)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (k, series) in self.series.iter().enumerate() {
            self.render_series(&mut s, &f, series);
            let ly = MARGIN + 15.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
                WIDTH - MARGIN - 120.0,
                series.color,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn render_series(&self, s: &mut String, f: &Frame, series: &Series) {
        let pts: Vec<(f64, f64)> =
            series.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        match series.style {
            Style::Step => {
                if pts.is_empty() {
                    return;
                }
                let mut d = format!("M{:.2},{:.2}", f.px(pts[0].0), f.py(pts[0].1));
                for w in pts.windows(2) {
                    let _ = write!(d, " H{:.2} V{:.2}", f.px(w[1].0), f.py(w[1].1));
                }
                let _ = writeln!(s, r#"<path d="{d}" stroke="{}" fill="none" stroke-width="1"/>"#, series.color);
            }
            Style::Points => {
                for (x, y) in pts {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="{}"/>"#,
                        f.px(x),
                        f.py(y),
                        series.color
                    );
                }
            }
            Style::Crosses => {
                for (x, y) in pts {
                    let (cx, cy) = (f.px(x), f.py(y));
                    let _ = writeln!(
                        s,
                        r#"<path d="M{:.2},{:.2} l6,6 m0,-6 l-6,6" stroke="{}"/>"#,
                        cx - 3.0,
                        cy - 3.0,
                        series.color
                    );
                }
            }
        }
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e5).contains(&v.abs()) {
        format!("{}", (v * 1000.0).round() / 1000.0)
    } else {
        format!("{v:.2e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(style: Style) -> Plot {
        Plot {
            title: "a < b".into(),
            x_label: "t".into(),
            y_label: "N".into(),
            series: vec![Series {
                label: "s".into(),
                style,
                color: "black",
                points: vec![(0.0, 0.0), (1.0, 1.0), (2.5, 2.0)],
            }],
        }
    }

    #[test]
    fn step_path_has_one_segment_pair_per_jump() {
        let svg = plot(Style::Step).render();
        assert_eq!(svg.matches(" H").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(plot(Style::Points).render(), plot(Style::Points).render());
    }

    #[test]
    fn empty_series_still_renders() {
        let mut p = plot(Style::Crosses);
        p.series[0].points.clear();
        assert!(p.render().contains("</svg>"));
    }
}
