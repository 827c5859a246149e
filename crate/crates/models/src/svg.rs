//! Minimal SVG line plots (path elements only, no external renderer).

use collapsar_profiles::json::fmt_f64;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Symmetric log squash for plotting values spanning many decades.
pub fn symlog(v: f64) -> f64 {
    v.signum() * (1.0 + v.abs()).ln()
}

/// Render series into a fixed 800x480 viewport; x and y are taken as
/// already transformed (callers squash with `symlog` as needed).
pub fn line_plot(title: &str, series: &[Series]) -> String {
    let (w, h) = (800.0, 480.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 30.0, 40.0);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !(xmax > xmin) {
        xmax = xmin + 1.0;
    }
    if !(ymax > ymin) {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
        ml
    ));
    // axes
    out.push_str(&format!(
        "<path d=\"M {ml} {mt} L {ml} {y0} L {x1} {y0}\" stroke=\"black\" fill=\"none\"/>\n",
        y0 = h - mb,
        x1 = w - mr
    ));
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            let cmd = if k == 0 { "M" } else { "L" };
            d.push_str(&format!("{cmd} {:.2} {:.2} ", sx(x), sy(y)));
        }
        out.push_str(&format!(
            "<path d=\"{d}\" stroke=\"{}\" fill=\"none\" stroke-width=\"1.2\"/>\n",
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            w - mr - 140.0,
            mt + 16.0 * (i + 1) as f64,
            s.color,
            s.label
        ));
    }
    // corner annotations of the data ranges (true values, 6 digits)
    out.push_str(&format!(
        "<text x=\"{ml}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">x: [{}, {}] y: [{}, {}]</text>\n",
        h - 8.0,
        trim6(xmin),
        trim6(xmax),
        trim6(ymin),
        trim6(ymax)
    ));
    out.push_str("</svg>\n");
    out
}

fn trim6(v: f64) -> String {
    let s = format!("{v:.6e}");
    let _ = fmt_f64(v);
    s
}
