//! Minimal SVG line chart of a sweep: one curve per scheme, SNR in dB on
//! the x axis, mean symmetric rate with +-1 standard error bars on the y axis.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::harness::SweepResult;
use crate::{HarnessError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_Y: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const MARKERS: [&str; 3] = ["circle", "square", "triangle"];

/// Round step giving roughly `target` intervals over `span`.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let magnitude = 10f64.powf(raw.log10().floor());
    let scaled = raw / magnitude;
    let nice = if scaled < 1.5 {
        1.0
    } else if scaled < 3.0 {
        2.0
    } else if scaled < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn marker(kind: &str, x: f64, y: f64, color: &str) -> String {
    match kind {
        "square" => format!(r#"<rect x="{:.1}" y="{:.1}" width="7" height="7" fill="{color}"/>"#, x - 3.5, y - 3.5),
        "triangle" => format!(
            r#"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{color}"/>"#,
            x,
            y - 4.5,
            x - 4.0,
            y + 3.5,
            x + 4.0,
            y + 3.5
        ),
        _ => format!(r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#),
    }
}

pub fn render_svg(result: &SweepResult) -> Result<String> {
    if result.rows.is_empty() {
        return Err(HarnessError::InvalidSpec("nothing to plot".into()));
    }
    let x_min = result.rows.iter().map(|r| r.snr_db).fold(f64::INFINITY, f64::min);
    let mut x_max = result.rows.iter().map(|r| r.snr_db).fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let y_top = result.rows.iter().map(|r| r.mean + r.stderr).fold(0.0, f64::max);
    let y_step = nice_step(y_top.max(1e-9), 6.0);
    let y_max = (y_top / y_step).ceil().max(1.0) * y_step;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| MARGIN_Y + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let cfg = &result.cfg;
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="25" text-anchor="middle" font-size="14">K={} L={} N={} M={}, {} trials</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        cfg.users(),
        cfg.antennas(),
        cfg.files(),
        cfg.cache(),
        result.rows[0].trials
    );

    let x_step = nice_step(x_max - x_min, 8.0);
    let mut x = (x_min / x_step).ceil() * x_step;
    while x <= x_max + 1e-9 {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#ddd"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"##,
            px(x),
            MARGIN_Y,
            MARGIN_Y + plot_h,
            MARGIN_Y + plot_h + 16.0,
            x
        );
        x += x_step;
    }
    let mut y = 0.0;
    while y <= y_max + 1e-9 {
        let label = format!("{:.*}", if y_step < 1.0 { 2 } else { 0 }, y);
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#ddd"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{label}</text>"##,
            MARGIN_LEFT,
            py(y),
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            py(y) + 4.0
        );
        y += y_step;
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">SNR (dB)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">symmetric rate (bits/channel use)</text>"#,
        MARGIN_Y + plot_h / 2.0
    );

    for (i, scheme) in result.schemes().into_iter().enumerate() {
        let color = COLORS[(scheme.number() as usize - 1) % COLORS.len()];
        let shape = MARKERS[(scheme.number() as usize - 1) % MARKERS.len()];
        let rows: Vec<_> = result.rows.iter().filter(|r| r.scheme == scheme).collect();
        let points: Vec<String> = rows.iter().map(|r| format!("{:.1},{:.1}", px(r.snr_db), py(r.mean))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        for r in &rows {
            let (cx, lo, hi) = (px(r.snr_db), py(r.mean - r.stderr), py(r.mean + r.stderr));
            let _ = writeln!(svg, r#"<line x1="{cx:.1}" y1="{lo:.1}" x2="{cx:.1}" y2="{hi:.1}" stroke="{color}"/>"#);
            let _ = writeln!(svg, "{}", marker(shape, cx, py(r.mean), color));
        }
        let ly = MARGIN_Y + 20.0 + 22.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"/>"#, lx + 24.0);
        let _ = writeln!(svg, "{}", marker(shape, lx + 12.0, ly, color));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}: {}</text>"#, lx + 30.0, ly + 4.0, scheme.number(), scheme);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, render_svg(result)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::SweepRow;
    use cc_miso_core::{BeamSolver, Scheme, SystemConfig};

    #[test]
    fn one_polyline_per_scheme() {
        let mut rows = Vec::new();
        for db in [10.0, 20.0, 30.0] {
            for s in Scheme::ALL {
                rows.push(SweepRow { snr_db: db, scheme: s, mean: db / 10.0 * s.number() as f64, stderr: 0.1, trials: 3 });
            }
        }
        let result = SweepResult {
            cfg: SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap(),
            solver: BeamSolver::default(),
            base_seed: 0,
            redraws: 0,
            rows,
        };
        let svg = render_svg(&result).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(20.0, 8.0), 2.0);
        assert_eq!(nice_step(40.0, 8.0), 5.0);
        assert!((nice_step(1.2, 6.0) - 0.2).abs() < 1e-12);
    }
}
