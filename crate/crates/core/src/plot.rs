//! Log-log line charts as standalone SVG.
//!
//! Output depends only on the input values: coordinates are printed with a
//! fixed number of decimals and elements are emitted in input order.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Symmetric error half-widths, one per point.
    pub errors: Option<Vec<f64>>,
}

/// Dashed curve `floor + exp(log_beta) * x^alpha` over `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOverlay {
    pub label: String,
    pub alpha: f64,
    pub log_beta: f64,
    pub floor: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl FitOverlay {
    fn value(&self, x: f64) -> f64 {
        self.floor + (self.log_beta + self.alpha * x.ln()).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<PlotSeries>,
    pub overlays: Vec<FitOverlay>,
    pub width: f64,
    pub height: f64,
}

impl Chart {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: "training samples N".into(),
            y_label: "risk".into(),
            series: Vec::new(),
            overlays: Vec::new(),
            width: 720.0,
            height: 480.0,
        }
    }
}

const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const OVERLAY_SAMPLES: usize = 64;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Decade-aligned log10 bounds covering `[lo, hi]`.
fn decade_bounds(lo: f64, hi: f64) -> (i32, i32) {
    let a = lo.log10().floor() as i32;
    let mut b = hi.log10().ceil() as i32;
    if b <= a {
        b = a + 1;
    }
    (a, b)
}

struct Axes {
    x: (i32, i32),
    y: (i32, i32),
    plot_w: f64,
    plot_h: f64,
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x.log10() - self.x.0 as f64) / (self.x.1 - self.x.0) as f64 * self.plot_w
    }

    fn py(&self, y: f64) -> f64 {
        TOP + (self.y.1 as f64 - y.log10()) / (self.y.1 - self.y.0) as f64 * self.plot_h
    }

    fn y_floor(&self) -> f64 {
        10f64.powi(self.y.0)
    }
}

fn positive(p: &(f64, f64)) -> bool {
    p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite()
}

pub fn render_svg(chart: &Chart) -> Result<String> {
    if chart.series.is_empty() {
        return Err(Error::InsufficientData("nothing to plot".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &chart.series {
        if let Some(e) = &s.errors {
            if e.len() != s.points.len() {
                return Err(Error::Dimension(format!(
                    "series `{}` has {} points but {} error values",
                    s.label,
                    s.points.len(),
                    e.len()
                )));
            }
        }
        for (i, p) in s.points.iter().enumerate() {
            if !positive(p) {
                continue;
            }
            xs.push(p.0);
            ys.push(p.1);
            if let Some(e) = &s.errors {
                ys.push(p.1 + e[i]);
            }
        }
    }
    if xs.is_empty() {
        return Err(Error::InsufficientData("no positive points to plot on log axes".into()));
    }
    let fold = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
    };
    let (x_lo, x_hi) = fold(&xs);
    let (y_lo, y_hi) = fold(&ys);
    let axes = Axes {
        x: decade_bounds(x_lo, x_hi),
        y: decade_bounds(y_lo, y_hi),
        plot_w: chart.width - LEFT - RIGHT,
        plot_h: chart.height - TOP - BOTTOM,
    };

    let mut svg = String::new();
    let (w, h) = (chart.width, chart.height);
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + axes.plot_w / 2.0,
        escape(&chart.title)
    )
    .unwrap();

    // Grid and tick labels at every decade.
    svg.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
    for e in axes.x.0..=axes.x.1 {
        let x = axes.px(10f64.powi(e));
        writeln!(svg, r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}"/>"#, TOP + axes.plot_h).unwrap();
    }
    for e in axes.y.0..=axes.y.1 {
        let y = axes.py(10f64.powi(e));
        writeln!(svg, r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, LEFT + axes.plot_w).unwrap();
    }
    svg.push_str("</g>\n");
    for e in axes.x.0..=axes.x.1 {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">10<tspan dy="-6" font-size="9">{e}</tspan></text>"#,
            axes.px(10f64.powi(e)),
            TOP + axes.plot_h + 18.0
        )
        .unwrap();
    }
    for e in axes.y.0..=axes.y.1 {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">10<tspan dy="-6" font-size="9">{e}</tspan></text>"#,
            LEFT - 8.0,
            axes.py(10f64.powi(e)) + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        axes.plot_w, axes.plot_h
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + axes.plot_w / 2.0,
        h - 12.0,
        escape(&chart.x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + axes.plot_h / 2.0,
        TOP + axes.plot_h / 2.0,
        escape(&chart.y_label)
    )
    .unwrap();

    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if let Some(errors) = &s.errors {
            writeln!(svg, r#"<g stroke="{color}" stroke-width="1">"#).unwrap();
            for (p, e) in s.points.iter().zip(errors) {
                if !positive(p) || *e <= 0.0 {
                    continue;
                }
                let lo = (p.1 - e).max(axes.y_floor());
                let x = axes.px(p.0);
                writeln!(
                    svg,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
                    axes.py(lo),
                    axes.py(p.1 + e)
                )
                .unwrap();
            }
            svg.push_str("</g>\n");
        }
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|p| positive(p))
            .map(|p| format!("{:.2},{:.2}", axes.px(p.0), axes.py(p.1)))
            .collect();
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + axes.plot_w + 12.0;
        writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.8"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label)).unwrap();
    }

    let legend_base = TOP + 14.0 + 18.0 * chart.series.len() as f64;
    for (i, o) in chart.overlays.iter().enumerate() {
        if !(o.x_min > 0.0 && o.x_max > o.x_min) {
            return Err(Error::Config(format!("overlay `{}` has an empty range", o.label)));
        }
        let color = PALETTE[i % PALETTE.len()];
        let (a, b) = (o.x_min.ln(), o.x_max.ln());
        let coords: Vec<String> = (0..OVERLAY_SAMPLES)
            .map(|j| (a + (b - a) * j as f64 / (OVERLAY_SAMPLES - 1) as f64).exp())
            .map(|x| (x, o.value(x)))
            .filter(positive)
            .map(|(x, y)| format!("{:.2},{:.2}", axes.px(x), axes.py(y.max(axes.y_floor()))))
            .collect();
        writeln!(
            svg,
            r#"<path fill="none" stroke="{color}" stroke-width="1.2" stroke-dasharray="6 4" d="M{}"/>"#,
            coords.join(" L")
        )
        .unwrap();
        let ly = legend_base + 18.0 * i as f64;
        let lx = LEFT + axes.plot_w + 12.0;
        writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-dasharray="6 4"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#, lx + 26.0, ly + 4.0, escape(&o.label)).unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
