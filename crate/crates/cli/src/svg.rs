//! Line chart of the solution components against η.

use std::fmt::Write;

use fbf_blasius::problems::Sample;

use crate::args::Component;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 560.0;
const PLOT_H: f64 = 390.0;

impl Component {
    pub fn key(self) -> &'static str {
        match self {
            Component::F => "f",
            Component::Fp => "fp",
            Component::Fpp => "fpp",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Component::F => "f",
            Component::Fp => "f\u{2032}",
            Component::Fpp => "f\u{2033}",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Component::F => "#1f77b4",
            Component::Fp => "#d62728",
            Component::Fpp => "#2ca02c",
        }
    }

    pub fn value(self, s: &Sample<f64>) -> f64 {
        match self {
            Component::F => s.f,
            Component::Fp => s.fp,
            Component::Fpp => s.fpp,
        }
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * base)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * base)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders one polyline per component (one point per sample) with axes,
/// tick labels, axis titles and a legend.
pub fn render(samples: &[Sample<f64>], components: &[Component], title: &str) -> String {
    let x_max = samples.last().map_or(1.0, |s| s.eta).max(f64::MIN_POSITIVE);
    let values = || {
        components
            .iter()
            .flat_map(|&c| samples.iter().map(move |s| c.value(s)))
    };
    let y_min = values().fold(0.0f64, f64::min);
    let mut y_max = values().fold(0.0f64, f64::max);
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    y_max += 0.05 * (y_max - y_min);
    let px = |x: f64| LEFT + x / x_max * PLOT_W;
    let py = |y: f64| TOP + PLOT_H - (y - y_min) / (y_max - y_min) * PLOT_H;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + PLOT_W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<g id="plot-area" data-left="{LEFT}" data-top="{TOP}" data-width="{PLOT_W}" data-height="{PLOT_H}" data-x-min="0" data-x-max="{x_max:e}" data-y-min="{y_min:e}" data-y-max="{y_max:e}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for t in ticks(0.0, x_max) {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.3}" y1="{b}" x2="{x:.3}" y2="{b2}" stroke="black"/><text x="{x:.3}" y="{ty}" text-anchor="middle">{}</text>"##,
            tick_label(t),
            b = TOP + PLOT_H,
            b2 = TOP + PLOT_H + 5.0,
            ty = TOP + PLOT_H + 20.0
        );
    }
    for t in ticks(y_min, y_max) {
        let y = py(t);
        let _ = writeln!(
            s,
            r##"<line x1="{l2}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{tx}" y="{ty:.3}" text-anchor="end">{}</text>"##,
            tick_label(t),
            l2 = LEFT - 5.0,
            tx = LEFT - 8.0,
            ty = y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{}" y="{}" text-anchor="middle">η</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 45.0
    );
    let names: Vec<&str> = components.iter().map(|c| c.label()).collect();
    let _ = writeln!(
        s,
        r#"<text id="y-label" x="20" y="{cy}" text-anchor="middle" transform="rotate(-90 20 {cy})">{}</text>"#,
        names.join(", "),
        cy = TOP + PLOT_H / 2.0
    );
    for &c in components {
        let mut pts = String::new();
        for sample in samples {
            let _ = write!(pts, "{:.6},{:.6} ", px(sample.eta), py(c.value(sample)));
        }
        let _ = writeln!(
            s,
            r#"<polyline data-component="{}" data-points="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            c.key(),
            samples.len(),
            c.color(),
            pts.trim_end()
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="legend">"#);
    for (k, &c) in components.iter().enumerate() {
        let y = TOP + 20.0 + 22.0 * k as f64;
        let x = LEFT + PLOT_W + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 30.0,
            c.color(),
            x + 38.0,
            y + 4.0,
            c.label()
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
