//! Minimal static SVG charts.

use std::fmt::Write;

use num_complex::Complex64;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Roughly `count` round tick positions covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return vec![lo];
    }
    let raw = (hi - lo) / count.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(
    out: &mut String,
    f: &Frame,
    x_ticks: &[(f64, String)],
    y_ticks: &[f64],
    x_label: &str,
    y_label: &str,
) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for (x, label) in x_ticks {
        let px = f.px(*x);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{t}" stroke="#e0e0e0"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"##,
            b + 16.0,
            escape(label)
        );
    }
    for &y in y_ticks {
        let py = f.py(y);
        let _ = writeln!(
            out,
            r##"<line x1="{l}" y1="{py:.2}" x2="{r}" y2="{py:.2}" stroke="#e0e0e0"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            l - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, names: &[&str]) {
    let x = WIDTH - RIGHT + 14.0;
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let c = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="12" height="12" fill="{c}"/><text x="{}" y="{}">{}</text>"#,
            y - 10.0,
            x + 18.0,
            y,
            escape(name)
        );
    }
}

/// One polyline with markers per series. With `log_x` the x axis is base-2
/// logarithmic (all x must be positive).
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_x: bool,
) -> String {
    let tx = |x: f64| if log_x { x.log2() } else { x };
    let pts = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut xl, mut xh, mut yl, mut yh) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    let mut xs = Vec::new();
    for &(x, y) in pts {
        xl = xl.min(tx(x));
        xh = xh.max(tx(x));
        yl = yl.min(y);
        yh = yh.max(y);
        xs.push(x);
    }
    if xs.is_empty() {
        (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = padded(xl, xh);
    let (y0, y1) = padded(yl, yh);
    let f = Frame { x0, x1, y0, y1 };
    let x_ticks: Vec<(f64, String)> = if log_x {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.iter().map(|&x| (x.log2(), fmt_tick(x))).collect()
    } else {
        nice_ticks(x0, x1, 6)
            .into_iter()
            .map(|x| (x, fmt_tick(x)))
            .collect()
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(
        &mut out,
        &f,
        &x_ticks,
        &nice_ticks(y0, y1, 6),
        x_label,
        y_label,
    );
    for (i, s) in series.iter().enumerate() {
        let c = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(tx(x)), f.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for p in &coords {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(
                out,
                r#"<circle class="point" cx="{x}" cy="{y}" r="3" fill="{c}"/>"#
            );
        }
    }
    let names: Vec<&str> = series.iter().map(|s| s.name.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

/// Points in the complex plane with the unit circle overlaid, on equal axes.
pub fn root_scatter(title: &str, groups: &[(String, Vec<Complex64>)]) -> String {
    let extent = groups
        .iter()
        .flat_map(|g| g.1.iter())
        .map(|z| z.re.abs().max(z.im.abs()))
        .filter(|v| v.is_finite())
        .fold(1.0f64, f64::max)
        .min(1e6)
        * 1.1;
    // square plotting area
    let side = (HEIGHT - TOP - BOTTOM).min(WIDTH - LEFT - RIGHT);
    let span = WIDTH - LEFT - RIGHT;
    let half_x = extent * span / side;
    let f = Frame {
        x0: -half_x,
        x1: half_x,
        y0: -extent,
        y1: extent,
    };
    let ticks = nice_ticks(-extent, extent, 6);
    let x_ticks: Vec<(f64, String)> = nice_ticks(-half_x, half_x, 8)
        .into_iter()
        .map(|x| (x, fmt_tick(x)))
        .collect();
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, &x_ticks, &ticks, "Re z", "Im z");
    let (cx, cy) = (f.px(0.0), f.py(0.0));
    let rx = f.px(1.0) - cx;
    let ry = cy - f.py(1.0);
    let _ = writeln!(
        out,
        r#"<ellipse class="unit-circle" cx="{cx:.2}" cy="{cy:.2}" rx="{rx:.2}" ry="{ry:.2}" fill="none" stroke="black" stroke-dasharray="4 3"/>"#
    );
    for (i, (_, zs)) in groups.iter().enumerate() {
        let c = PALETTE[i % PALETTE.len()];
        for z in zs
            .iter()
            .filter(|z| z.re.abs() <= half_x && z.im.abs() <= extent)
        {
            let _ = writeln!(
                out,
                r#"<circle class="root" cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}" fill-opacity="0.75"/>"#,
                f.px(z.re),
                f.py(z.im)
            );
        }
    }
    let names: Vec<&str> = groups.iter().map(|g| g.0.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_cover_range() {
        let t = nice_ticks(0.0, 1.0, 5);
        let want = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        assert_eq!(t.len(), want.len());
        assert!(
            t.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12),
            "{t:?}"
        );
        let t = nice_ticks(-3.7, 12.2, 6);
        assert!(t.first().unwrap() >= &-3.7 && t.last().unwrap() <= &12.2);
        assert_eq!(t, vec![0.0, 5.0, 10.0]);
    }

    #[test]
    fn scatter_has_one_marker_per_point() {
        let zs: Vec<Complex64> = (0..10)
            .map(|k| Complex64::from_polar(1.0, k as f64))
            .collect();
        let svg = root_scatter("t", &[("a".into(), zs)]);
        assert_eq!(svg.matches(r#"class="root""#).count(), 10);
        assert!(svg.contains("unit-circle"));
    }

    #[test]
    fn escapes_markup() {
        let svg = line_chart(
            "a<b",
            "x",
            "y",
            &[Series {
                name: "m&n".into(),
                points: vec![(1.0, 2.0)],
            }],
            false,
        );
        assert!(svg.contains("a&lt;b") && svg.contains("m&amp;n"));
    }
}
