//! Minimal standalone SVG line plots and heatmaps.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MAX_CELLS: usize = 96;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (x1, y1) = (WIDTH - MARGIN, HEIGHT - MARGIN);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    writeln!(
        out,
        r#"<path d="M{MARGIN} {MARGIN} L{MARGIN} {y1} L{x1} {y1}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let px = MARGIN + t * (x1 - MARGIN);
        let py = y1 - t * (y1 - MARGIN);
        let xv = xr.0 + t * (xr.1 - xr.0);
        let yv = yr.0 + t * (yr.1 - yr.0);
        writeln!(out, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{xv:.3}</text>"#, y1 + 18.0).unwrap();
        writeln!(out, r#"<text x="{:.1}" y="{py:.1}" text-anchor="end">{yv:.3}</text>"#, MARGIN - 6.0).unwrap();
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(xlabel)).unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let xr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, xr, yr);
    let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (HEIGHT - 2.0 * MARGIN);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .fold(String::new(), |mut acc, &(x, y)| {
                write!(acc, "{:.2},{:.2} ", sx(x), sy(y)).unwrap();
                acc
            });
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.trim_end()).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0 - 120.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(&s.label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn color_ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * t) as u8;
    let b = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// `values[i][k]` at `(xs[i], ys[k])`; downsampled to at most `MAX_CELLS` per axis.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], values: &[Vec<f64>]) -> String {
    let sx = xs.len().div_ceil(MAX_CELLS).max(1);
    let sy = ys.len().div_ceil(MAX_CELLS).max(1);
    let xr = range(xs.iter().copied());
    let yr = range(ys.iter().copied());
    let vr = range(values.iter().flatten().copied());
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, xr, yr);
    let nx = xs.len().div_ceil(sx);
    let ny = ys.len().div_ceil(sy);
    let cw = (WIDTH - 2.0 * MARGIN) / nx as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / ny as f64;
    for (bi, i) in (0..xs.len()).step_by(sx).enumerate() {
        for (bk, k) in (0..ys.len()).step_by(sy).enumerate() {
            let v = values[i][k];
            let t = if v.is_finite() { (v - vr.0) / (vr.1 - vr.0) } else { 0.0 };
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                MARGIN + bi as f64 * cw,
                HEIGHT - MARGIN - (bk + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                color_ramp(t)
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">range [{:.3e}, {:.3e}]</text>"#,
        WIDTH - MARGIN,
        MARGIN - 8.0,
        vr.0,
        vr.1
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_wellformed_svg() {
        let s = Series {
            label: "w".into(),
            points: (0..50).map(|i| (i as f64, (i as f64 / 5.0).sin())).collect(),
        };
        let svg = line_plot("window <E>", "x", "w", &[s]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("&lt;E&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn heatmap_is_downsampled() {
        let xs: Vec<f64> = (0..256).map(|i| i as f64).collect();
        let vals = vec![vec![1.0; 256]; 256];
        let svg = heatmap("k", "q", "p", &xs, &xs, &vals);
        assert!(svg.matches("<rect").count() <= MAX_CELLS * MAX_CELLS + 1);
    }
}
