//! Minimal hand-rolled SVG line charts: polylines, axes with tick labels and
//! a legend. Rendering fidelity is deliberately basic; the CSVs next to the
//! plots are the quantitative output.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMark {
    Line,
    DottedLine,
    Circles,
}

#[derive(Debug, Clone)]
pub struct ChartSeries {
    pub label: String,
    pub color: String,
    pub mark: SeriesMark,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
    pub series: Vec<ChartSeries>,
}

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 48.0;

impl LineChart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 640.0,
            height: 420.0,
            series: Vec::new(),
        }
    }

    pub fn add_series(
        &mut self,
        label: impl Into<String>,
        color: impl Into<String>,
        mark: SeriesMark,
        points: Vec<(f64, f64)>,
    ) {
        self.series.push(ChartSeries {
            label: label.into(),
            color: color.into(),
            mark,
            points,
        });
    }

    pub fn render(&self) -> String {
        let (x_min, x_max) = padded_range(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), 0.0);
        let (y_min, y_max) = padded_range(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), 0.05);

        let plot_w = self.width - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = self.height - MARGIN_TOP - MARGIN_BOTTOM;
        let to_x = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let to_y = |y: f64| MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        // Frame.
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black" stroke-width="1"/>"#,
            MARGIN_LEFT, MARGIN_TOP, plot_w, plot_h
        );

        // Ticks and grid labels.
        for tick in ticks(x_min, x_max) {
            let x = to_x(tick);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black" stroke-width="1"/>"#,
                MARGIN_TOP + plot_h,
                MARGIN_TOP + plot_h + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + plot_h + 18.0,
                format_tick(tick)
            );
        }
        for tick in ticks(y_min, y_max) {
            let y = to_y(tick);
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black" stroke-width="1"/>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 8.0,
                y + 4.0,
                format_tick(tick)
            );
        }

        // Axis labels.
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            self.height - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        // Series.
        for series in &self.series {
            match series.mark {
                SeriesMark::Circles => {
                    for &(x, y) in &series.points {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="{}"/>"#,
                            to_x(x),
                            to_y(y),
                            series.color
                        );
                    }
                }
                SeriesMark::Line | SeriesMark::DottedLine => {
                    let dash = if series.mark == SeriesMark::DottedLine {
                        r#" stroke-dasharray="3,4""#
                    } else {
                        ""
                    };
                    let mut path = String::new();
                    for &(x, y) in &series.points {
                        let _ = write!(path, "{:.2},{:.2} ", to_x(x), to_y(y));
                    }
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.4"{dash}/>"#,
                        path.trim_end(),
                        series.color
                    );
                }
            }
        }

        // Legend, top-right inside the frame.
        for (i, series) in self.series.iter().enumerate() {
            let y = MARGIN_TOP + 16.0 + 16.0 * i as f64;
            let x = MARGIN_LEFT + plot_w - 150.0;
            match series.mark {
                SeriesMark::Circles => {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.1}" cy="{:.1}" r="2.2" fill="{}"/>"#,
                        x + 11.0,
                        y - 4.0,
                        series.color
                    );
                }
                SeriesMark::Line | SeriesMark::DottedLine => {
                    let dash = if series.mark == SeriesMark::DottedLine {
                        r#" stroke-dasharray="3,4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        r#"<line x1="{x:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="1.4"{dash}/>"#,
                        y - 4.0,
                        x + 22.0,
                        y - 4.0,
                        series.color
                    );
                }
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
                x + 28.0,
                escape(&series.label)
            );
        }

        out.push_str("</svg>\n");
        out
    }
}

fn padded_range(values: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if min == max {
        return (min - 0.5, max + 0.5);
    }
    let span = max - min;
    (min - pad * span, max + pad * span)
}

/// About five ticks on a 1/2/5 ladder.
fn ticks(min: f64, max: f64) -> Vec<f64> {
    let span = max - min;
    let raw_step = span / 5.0;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut ticks = Vec::new();
    let mut tick = (min / step).ceil() * step;
    while tick <= max + step * 1e-9 {
        // Snap values that should be exact (e.g. 0) back onto the grid.
        let snapped = (tick / step).round() * step;
        ticks.push(if snapped.abs() < step * 1e-9 { 0.0 } else { snapped });
        tick += step;
    }
    ticks
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 0.001 && a < 100000.0 {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
