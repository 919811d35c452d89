//! Minimal static SVG line plot: reference solid, approximation dashed.

use std::fmt::Write;

use rbg_core::dae::VariableSpace;
use rbg_core::metrics::Channel;
use rbg_core::sim::Trajectory;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn series(t: &Trajectory, c: Channel) -> Vec<f64> {
    (0..t.samples())
        .map(|k| match c {
            Channel::Theta(i) => t.theta()[(i, k)],
            Channel::Gamma(i) => t.gamma()[(i, k)],
        })
        .collect()
}

pub fn render(reference: &Trajectory, approx: &Trajectory, space: &VariableSpace, channels: &[Channel]) -> String {
    let t_end = reference.t_final().max(f64::MIN_POSITIVE);
    let curves: Vec<(Vec<f64>, Vec<f64>)> = channels.iter().map(|&c| (series(reference, c), series(approx, c))).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in curves.iter().flat_map(|(r, a)| r.iter().chain(a)).filter(|v| v.is_finite()) {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let x = |t: f64| MARGIN + t / t_end * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{hi:.3}</text>"#, MARGIN - 4.0, MARGIN + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{lo:.3}</text>"#, MARGIN - 4.0, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<text x="{}" y="{}">0</text>"#, MARGIN, HEIGHT - MARGIN + 16.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{t_end} s</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    for (n, ((r, a), c)) in curves.iter().zip(channels).enumerate() {
        let color = COLORS[n % COLORS.len()];
        for (values, dash) in [(r, ""), (a, r#" stroke-dasharray="6 4""#)] {
            let mut d = String::new();
            let mut pen_up = true;
            for (k, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    pen_up = true;
                    continue;
                }
                let _ = write!(d, "{}{:.2} {:.2} ", if pen_up { 'M' } else { 'L' }, x(reference.time(k)), y(*v));
                pen_up = false;
            }
            let _ = writeln!(s, r#"<path d="{}" stroke="{color}" fill="none"{dash}/>"#, d.trim_end());
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{} (solid: reference, dashed: hybrid)</text>"#,
            MARGIN + 8.0,
            MARGIN - 20.0 + 14.0 * n as f64 - 14.0 * (curves.len() as f64 - 1.0),
            c.name(space)
        );
    }
    s.push_str("</svg>\n");
    s
}
