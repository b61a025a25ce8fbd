//! Self-contained SVG line charts.

use std::fmt::Write;

use kpp_core::eigen::ConvergenceRow;
use kpp_core::fronttrack::{FrontTrace, WindowedSpeed};
use kpp_core::theory::SpeedBounds;

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const GAP: f64 = 60.0;
const COLORS: [&str; 6] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

struct Panel {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if !(hi > lo) {
        let d = lo.abs().max(1.0) * 0.05;
        return (lo - d, hi + d);
    }
    let d = 0.05 * (hi - lo);
    (lo - d, hi + d)
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y.0, self.y.1);
        self.top + (self.y.1 - y) / (self.y.1 - self.y.0) * self.height
    }

    fn frame(&self, svg: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        let _ = writeln!(
            svg,
            r##"<rect x="{l:.1}" y="{t:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#333"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t - 10.0,
            escape(title)
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let (xp, yp) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                svg,
                r#"<text x="{xp:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                t + h + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
                l - 6.0,
                yp + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t + h + 36.0,
            escape(x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
            l - 52.0,
            t + h / 2.0,
            l - 52.0,
            t + h / 2.0,
            escape(y_label)
        );
    }

    fn line(&self, svg: &mut String, points: impl Iterator<Item = (f64, f64)>, color: &str) {
        let pts: Vec<String> = points
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        if pts.len() < 2 {
            return;
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
    }

    fn guide(&self, svg: &mut String, y: f64, label: &str, color: &str) {
        if !(y >= self.y.0 && y <= self.y.1) {
            return;
        }
        let yp = self.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{yp:.2}" x2="{:.1}" y2="{yp:.2}" stroke="{color}" stroke-dasharray="6 4"/>"#,
            self.left,
            self.left + self.width
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.2}" font-size="11" fill="{color}">{} = {y:.4}</text>"#,
            self.left + self.width + 6.0,
            yp + 4.0,
            escape(label)
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn open(height: f64) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg
}

/// Theoretical speeds worth drawing, with labels.
pub fn guide_lines(bounds: &SpeedBounds) -> Vec<(&'static str, f64)> {
    let mut g = vec![
        ("2 sqrt(min mu)", bounds.lower_homog),
        ("2 sqrt(max mu)", bounds.upper_homog),
    ];
    if bounds.homogeneous {
        g.truncate(1);
    }
    let optional = [
        ("w_inf", bounds.w_infinity),
        ("two-value lower", bounds.two_value_lower),
        ("two-value upper", bounds.two_value_upper),
        ("threshold lower", bounds.threshold_lower_on_wupper),
        ("threshold upper", bounds.threshold_upper_on_wlower),
    ];
    if !bounds.homogeneous {
        g.extend(optional.iter().filter_map(|(n, v)| v.map(|v| (*n, v))));
    }
    g
}

/// Front position and windowed speed against time, with the theoretical
/// speeds as dashed lines in the speed panel.
pub fn trace_svg(
    title: &str,
    trace: &FrontTrace,
    speeds: &[WindowedSpeed],
    bounds: Option<&SpeedBounds>,
) -> String {
    let height = MARGIN_TOP + 2.0 * PANEL_HEIGHT + GAP + 50.0;
    let mut svg = open(height);
    let width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let t_range = padded(0.0, trace.times().last().copied().unwrap_or(1.0));

    let top = Panel {
        left: MARGIN_LEFT,
        top: MARGIN_TOP,
        width,
        height: PANEL_HEIGHT,
        x: t_range,
        y: padded(0.0, range(trace.positions().iter().copied()).1.max(1.0)),
    };
    top.frame(&mut svg, &format!("{title}: front position"), "t", "x_front");
    top.line(
        &mut svg,
        trace.times().iter().copied().zip(trace.positions().iter().copied()),
        "#1f77b4",
    );

    let guides = bounds.map(guide_lines).unwrap_or_default();
    let (s_lo, s_hi) = range(speeds.iter().map(|s| s.speed));
    let (g_lo, g_hi) = range(guides.iter().map(|g| g.1));
    let y = if guides.is_empty() {
        padded(s_lo.min(s_hi), s_hi.max(s_lo))
    } else {
        // clip jumps of the level set so the guide lines stay readable
        padded(s_lo.min(g_lo).max(0.0), s_hi.min(1.5 * g_hi).max(g_hi))
    };
    let bottom = Panel {
        left: MARGIN_LEFT,
        top: MARGIN_TOP + PANEL_HEIGHT + GAP,
        width,
        height: PANEL_HEIGHT,
        x: t_range,
        y,
    };
    bottom.frame(&mut svg, "windowed speed", "t", "speed");
    bottom.line(&mut svg, speeds.iter().map(|s| (s.t_end, s.speed)), "#1f77b4");
    for (i, (label, v)) in guides.iter().enumerate() {
        bottom.guide(&mut svg, *v, label, COLORS[i % COLORS.len()]);
    }
    svg.push_str("</svg>\n");
    svg
}

/// `|w_L - w_inf|` against `L` on log-log axes.
pub fn convergence_svg(rows: &[ConvergenceRow]) -> String {
    let height = MARGIN_TOP + PANEL_HEIGHT + 50.0;
    let mut svg = open(height);
    let logs: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gap > 0.0)
        .map(|r| (r.period.log10(), r.gap.log10()))
        .collect();
    let panel = Panel {
        left: MARGIN_LEFT,
        top: MARGIN_TOP,
        width: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        height: PANEL_HEIGHT,
        x: padded(range(logs.iter().map(|p| p.0)).0, range(logs.iter().map(|p| p.0)).1),
        y: padded(range(logs.iter().map(|p| p.1)).0, range(logs.iter().map(|p| p.1)).1),
    };
    panel.frame(&mut svg, "w_L convergence", "log10 L", "log10 |w_L - w_inf|");
    panel.line(&mut svg, logs.iter().copied(), "#1f77b4");
    for &(x, y) in &logs {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/>"##,
            panel.px(x),
            panel.py(y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
