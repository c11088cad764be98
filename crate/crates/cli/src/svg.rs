//! SVG 1.1 figures: curves over the one-simplex and labelled cells of the
//! two-simplex. Coordinates are printed with two decimals so output is
//! stable across runs.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = ["#cfe2f3", "#f4cccc", "#d9ead3", "#fff2cc", "#d9d2e9", "#fce5cd", "#d0e0e3", "#ead1dc"];
const LINES: [&str; 4] = ["#1f4e79", "#a61c00", "#38761d", "#7f6000"];

fn header(title: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <title>{}</title>\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Curves over `x ∈ [0, 1]` (probability of the second state), with
/// vertical markers at `markers`.
pub fn interval_plot(title: &str, x_label: &str, series: &[Series], markers: &[f64]) -> String {
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (mut lo, mut hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let px = |x: f64| MARGIN + x * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - lo) / (hi - lo) * (H - 2.0 * MARGIN);
    let mut s = header(title);
    let (x0, x1, y0, y1) = (px(0.0), px(1.0), py(lo), py(hi));
    let _ = writeln!(s, "<path d=\"M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}\" fill=\"none\" stroke=\"black\"/>");
    for t in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{t}</text>",
            px(t),
            y0 + 16.0
        );
    }
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>", px(0.5), H - 12.0, escape(x_label));
    for (k, &m) in markers.iter().enumerate() {
        let _ = writeln!(
            s,
            "<line id=\"marker{k}\" x1=\"{0:.2}\" y1=\"{y0:.2}\" x2=\"{0:.2}\" y2=\"{y1:.2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
            px(m)
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let color = LINES[k % LINES.len()];
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>", pts.join(" "));
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{color}\">{}</text>",
            x1 - 90.0,
            MARGIN + 16.0 * k as f64,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn corner(i: usize) -> (f64, f64) {
    let side = W - 2.0 * MARGIN;
    let base = H - MARGIN;
    match i {
        0 => (MARGIN, base),
        1 => (W - MARGIN, base),
        _ => (W / 2.0, base - side * 3f64.sqrt() / 2.0),
    }
}

fn project(mu: &[f64]) -> (f64, f64) {
    (0..3).fold((0.0, 0.0), |(x, y), i| {
        let (cx, cy) = corner(i);
        (x + mu[i] * cx, y + mu[i] * cy)
    })
}

/// Cells of a subdivision of the two-simplex, each given by its vertices,
/// with optional highlighted beliefs.
pub fn triangle_plot(title: &str, states: &[String], cells: &[(String, Vec<Vec<f64>>)], points: &[Vec<f64>]) -> String {
    let mut s = header(title);
    for (k, (label, verts)) in cells.iter().enumerate() {
        let mut p: Vec<(f64, f64)> = verts.iter().map(|v| project(v)).collect();
        if p.is_empty() {
            continue;
        }
        let (cx, cy) = (p.iter().map(|q| q.0).sum::<f64>() / p.len() as f64, p.iter().map(|q| q.1).sum::<f64>() / p.len() as f64);
        p.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
        let d: Vec<String> = p.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>",
            d.join(" "),
            PALETTE[k % PALETTE.len()]
        );
        let _ = writeln!(s, "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"14\" text-anchor=\"middle\">{}</text>", escape(label));
    }
    for (i, name) in states.iter().enumerate().take(3) {
        let (x, y) = corner(i);
        let dy = if i == 2 { -8.0 } else { 18.0 };
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>", y + dy, escape(name));
    }
    for mu in points {
        let (x, y) = project(mu);
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"black\"/>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_plot_is_well_formed() {
        let s = interval_plot("v", "x", &[Series { name: "V".into(), points: vec![(0.0, 1.0), (0.5, 0.5), (1.0, 1.0)] }], &[0.25]);
        assert!(s.starts_with("<?xml") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains("marker0"));
    }

    #[test]
    fn triangle_cells_become_polygons() {
        let states: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let cells = vec![
            ("n".to_string(), vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0], vec![0.5, 0.0, 0.5]]),
            ("c".to_string(), vec![vec![0.5, 0.5, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.5, 0.0, 0.5]]),
        ];
        let s = triangle_plot("t", &states, &cells, &[]);
        assert_eq!(s.matches("<polygon").count(), 2);
    }
}
