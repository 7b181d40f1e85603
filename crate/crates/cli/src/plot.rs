//! Minimal SVG output: heat maps for 2D grids and grouped bar charts.

use std::fmt::Write as _;

const STOPS: [(f64, [u8; 3]); 5] = [
    (0.0, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.5, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.0, [253, 231, 37]),
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let k = STOPS.windows(2).position(|w| t <= w[1].0).unwrap_or(STOPS.len() - 2);
    let (t0, c0) = STOPS[k];
    let (t1, c1) = STOPS[k + 1];
    let u = (t - t0) / (t1 - t0);
    let mix = |a: u8, b: u8| (a as f64 + u * (b as f64 - a as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(c0[0], c1[0]), mix(c0[1], c1[1]), mix(c0[2], c1[2]))
}

fn header(out: &mut String, w: usize, h: usize, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heat map of `values[i * ys.len() + k]` at (xs[i], ys[k]); x to the right, y upward.
pub fn heatmap_svg(title: &str, xs: &[f64], ys: &[f64], values: &[f64], xlabel: &str, ylabel: &str) -> String {
    let cell = 4usize;
    let (left, top) = (60usize, 35usize);
    let (pw, ph) = (xs.len() * cell, ys.len() * cell);
    let (w, h) = (left + pw + 90, top + ph + 50);
    let vmax = values.iter().copied().fold(0.0, f64::max);
    let vmin = values.iter().copied().fold(0.0, f64::min);
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };
    let mut out = String::new();
    header(&mut out, w, h, title);
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for i in 0..xs.len() {
        for k in 0..ys.len() {
            let v = values[i * ys.len() + k];
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}"/>"#,
                left + i * cell,
                top + ph - (k + 1) * cell,
                color((v - vmin) / span)
            );
        }
    }
    out.push_str("</g>\n");
    let _ = writeln!(out, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = (ys[0], ys[ys.len() - 1]);
    let _ = writeln!(out, r#"<text x="{left}" y="{}">{x0}</text>"#, top + ph + 15);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{x1}</text>"#, left + pw, top + ph + 15);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2, top + ph + 35, escape(xlabel));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y0}</text>"#, left - 5, top + ph);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y1}</text>"#, left - 5, top + 10);
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        top + ph / 2,
        top + ph / 2,
        escape(ylabel)
    );
    // colour bar
    let bx = left + pw + 20;
    for b in 0..ph {
        let t = 1.0 - b as f64 / ph as f64;
        let _ = writeln!(out, r#"<rect x="{bx}" y="{}" width="15" height="1" fill="{}"/>"#, top + b, color(t));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{:.3e}</text>"#, bx + 18, top + 10, vmax);
    let _ = writeln!(out, r#"<text x="{}" y="{}">{:.3e}</text>"#, bx + 18, top + ph, vmin);
    out.push_str("</svg>\n");
    out
}

/// Bar chart with one group per entry of `groups`; every group has one bar per label.
pub fn grouped_bars_svg(title: &str, labels: &[String], groups: &[(String, Vec<f64>)]) -> String {
    let bar = 14usize;
    let gap = 20usize;
    let group_w = labels.len() * bar + gap;
    let (left, top, ph) = (50usize, 35usize, 220usize);
    let pw = groups.len() * group_w + gap;
    let (w, h) = (left + pw + 20, top + ph + 60);
    let vmax = groups.iter().flat_map(|(_, v)| v.iter().copied()).fold(0.0, f64::max).max(1e-300);
    let mut out = String::new();
    header(&mut out, w, h, title);
    let _ = writeln!(out, r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, top + ph, left + pw, top + ph);
    let _ = writeln!(out, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#, top + ph);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, left - 4, top + 10, vmax);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">0</text>"#, left - 4, top + ph);
    for (g, (name, vals)) in groups.iter().enumerate() {
        let gx = left + gap + g * group_w;
        for (b, v) in vals.iter().enumerate() {
            let bh = ((v.max(0.0) / vmax) * ph as f64).round() as usize;
            let t = if labels.len() > 1 { b as f64 / (labels.len() - 1) as f64 } else { 0.5 };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{bh}" fill="{}"><title>{} {}: {v}</title></rect>"#,
                gx + b * bar,
                top + ph - bh,
                bar - 2,
                color(t),
                escape(name),
                escape(&labels[b])
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            gx + labels.len() * bar / 2,
            top + ph + 18,
            escape(name)
        );
    }
    for (b, label) in labels.iter().enumerate() {
        let t = if labels.len() > 1 { b as f64 / (labels.len() - 1) as f64 } else { 0.5 };
        let lx = left + b * 70;
        let _ = writeln!(out, r#"<rect x="{lx}" y="{}" width="10" height="10" fill="{}"/>"#, top + ph + 32, color(t));
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 14, top + ph + 41, escape(label));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_map_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(2.0), "#fde725");
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 1.0];
        let svg = heatmap_svg("t", &xs, &ys, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], "x", "y");
        assert_eq!(svg.matches("width=\"4\" height=\"4\"").count(), 6);
        assert!(svg.ends_with("</svg>\n"));
    }
}
